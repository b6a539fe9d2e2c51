#pragma once

// Analytic single-bottleneck ISP model: traffic intensity, delay components,
// utilization, throughput and drop rates for a given user count.
//
// Units are SI throughout: bits, bits/second, requests/second, seconds,
// meters. One request is one packet. +infinity is a legal delay value.

#include <cstdint>
#include <string_view>
#include <utility>

namespace capplan {

using UserCount = std::uint64_t;

struct NetworkConfig {
  double bandwidth_bps = 1e8;
  double packet_size_bits = 12000.0;
  double per_user_request_rate_rps = 417.0;
  double server_capacity_rps = 20850.0;
  double server_capacity_users = 50.0;  // informational
  double propagation_speed_mps = 2e8;
  double cable_length_m = 90.0;
  std::uint64_t queue_limit_packets = 1000;

  // Baseline constants of the modelled network (100 Mbps link, 1500-byte
  // packets, 417 req/s per Full HD viewer, 50-user server, 90 m of cable).
  static NetworkConfig paper_defaults() { return {}; }

  // Time to put one packet on the wire, S/B.
  double service_time_s() const { return packet_size_bits / bandwidth_bps; }

  // Throws ValidationError naming the first field that breaks an invariant.
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

enum class QueueDelayMode { kLiteralSeconds, kServiceScaled };
enum class SaturationPolicy { kInfinite, kCapped };
enum class ProcessingMode { kLiteral, kDisabled };
enum class ThroughputMode { kPaper, kCarriedCapped, kLiteralEq9 };

// Resolves the unit ambiguities of the queueing, processing and throughput
// formulas. The default is {service-scaled, infinite, literal, paper}.
struct ModelModes {
  QueueDelayMode queue_delay_mode = QueueDelayMode::kServiceScaled;
  SaturationPolicy saturation_policy = SaturationPolicy::kInfinite;
  ProcessingMode processing_mode = ProcessingMode::kLiteral;
  ThroughputMode throughput_mode = ThroughputMode::kPaper;

  friend bool operator==(const ModelModes&, const ModelModes&) = default;
};

std::string_view to_string(QueueDelayMode mode);
std::string_view to_string(SaturationPolicy policy);
std::string_view to_string(ProcessingMode mode);
std::string_view to_string(ThroughputMode mode);

// Parsers for the names above; throw ValidationError on an unknown name.
QueueDelayMode parse_queue_delay_mode(std::string_view name);
SaturationPolicy parse_saturation_policy(std::string_view name);
ProcessingMode parse_processing_mode(std::string_view name);
ThroughputMode parse_throughput_mode(std::string_view name);

struct DelayBreakdown {
  double queue_s = 0.0;
  double processing_s = 0.0;
  double transmission_s = 0.0;
  double propagation_s = 0.0;
  double total_s = 0.0;

  friend bool operator==(const DelayBreakdown&, const DelayBreakdown&) = default;
};

struct PerformanceMetrics {
  UserCount n_users = 0;
  double r_total_rps = 0.0;
  double r_served_rps = 0.0;
  double rho = 0.0;
  DelayBreakdown delays;
  double utilization_pct = 0.0;
  double throughput_bps = 0.0;
  double queue_drops_pps = 0.0;
  double server_drops_rps = 0.0;
  bool saturated = false;

  friend bool operator==(const PerformanceMetrics&, const PerformanceMetrics&) = default;
};

struct ServedSplit {
  double served_rps = 0.0;
  double dropped_rps = 0.0;
};

double total_request_rate(double per_user_rps, UserCount n);

double traffic_intensity(double packet_size_bits, double r_total_rps, double bandwidth_bps);

// rho/(1-rho) below saturation, either as printed (seconds) or scaled by the
// service time. At rho >= 1 the saturation policy picks +inf or the time to
// drain a full queue, queue_limit * service_time.
double queuing_delay(double rho, double service_time_s, std::uint64_t queue_limit,
                     const ModelModes& modes);

double processing_delay(double r_served_rps, double capacity_rps, const ModelModes& modes);

double transmission_delay(double packet_size_bits, double bandwidth_bps);

double propagation_delay(double length_m, double speed_mps);

// Plain sum; +inf absorbs.
double total_delay(double queue_s, double processing_s, double transmission_s,
                   double propagation_s);

// served = min(total, capacity), dropped = total - served, with
// served + dropped == total holding bit-exactly (see model.cpp).
ServedSplit served_rate_and_server_drops(double r_total_rps, double capacity_rps);

double server_utilization(double r_served_rps, double capacity_rps);

// max(0, min(R_total - B/S, K)).
double queue_drops(double r_total_rps, double bandwidth_bps, double packet_size_bits,
                   std::uint64_t queue_limit);

double throughput(double r_served_rps, double packet_size_bits, double total_delay_s,
                  double bandwidth_bps, bool saturated, const ModelModes& modes);

// Full metrics record for n users. Pure and deterministic.
PerformanceMetrics evaluate_point(const NetworkConfig& config, const ModelModes& modes,
                                  UserCount n);

}  // namespace capplan

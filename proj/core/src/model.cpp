#include "capplan/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "capplan/errors.hpp"

namespace capplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ValidationError(what, field);
}

// d such that served + d == total in double arithmetic, searching a few ulps
// around total - served. Returns false when no such d exists (a rounding tie
// between two neighbours of an odd-mantissa total).
bool conserving_remainder(double served, double total, double& out) {
  const double d = total - served;
  if (served + d == total) {
    out = d;
    return true;
  }
  double up = d;
  double down = d;
  for (int step = 0; step < 4; ++step) {
    up = std::nextafter(up, kInf);
    down = std::nextafter(down, 0.0);
    if (served + up == total) {
      out = up;
      return true;
    }
    if (served + down == total) {
      out = down;
      return true;
    }
  }
  return false;
}

}  // namespace

void NetworkConfig::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  require(finite(bandwidth_bps) && bandwidth_bps > 0, "bandwidth_bps", "must be > 0");
  require(finite(packet_size_bits) && packet_size_bits > 0, "packet_size_bits", "must be > 0");
  require(finite(per_user_request_rate_rps) && per_user_request_rate_rps > 0,
          "per_user_request_rate_rps", "must be > 0");
  require(finite(server_capacity_rps) && server_capacity_rps > 0, "server_capacity_rps",
          "must be > 0");
  require(finite(server_capacity_users) && server_capacity_users >= 0, "server_capacity_users",
          "must be >= 0");
  require(finite(propagation_speed_mps) && propagation_speed_mps > 0, "propagation_speed_mps",
          "must be > 0");
  require(finite(cable_length_m) && cable_length_m >= 0, "cable_length_m", "must be >= 0");
}

std::string_view to_string(QueueDelayMode mode) {
  switch (mode) {
    case QueueDelayMode::kLiteralSeconds: return "literal-seconds";
    case QueueDelayMode::kServiceScaled: return "service-scaled";
  }
  return "?";
}

std::string_view to_string(SaturationPolicy policy) {
  switch (policy) {
    case SaturationPolicy::kInfinite: return "infinite";
    case SaturationPolicy::kCapped: return "capped";
  }
  return "?";
}

std::string_view to_string(ProcessingMode mode) {
  switch (mode) {
    case ProcessingMode::kLiteral: return "literal";
    case ProcessingMode::kDisabled: return "disabled";
  }
  return "?";
}

std::string_view to_string(ThroughputMode mode) {
  switch (mode) {
    case ThroughputMode::kPaper: return "paper";
    case ThroughputMode::kCarriedCapped: return "carried-capped";
    case ThroughputMode::kLiteralEq9: return "literal-eq9";
  }
  return "?";
}

QueueDelayMode parse_queue_delay_mode(std::string_view name) {
  if (name == "literal-seconds") return QueueDelayMode::kLiteralSeconds;
  if (name == "service-scaled") return QueueDelayMode::kServiceScaled;
  throw ValidationError("expected literal-seconds or service-scaled, got '" + std::string(name) +
                            "'",
                        "queue_delay_mode");
}

SaturationPolicy parse_saturation_policy(std::string_view name) {
  if (name == "infinite") return SaturationPolicy::kInfinite;
  if (name == "capped") return SaturationPolicy::kCapped;
  throw ValidationError("expected infinite or capped, got '" + std::string(name) + "'",
                        "saturation_policy");
}

ProcessingMode parse_processing_mode(std::string_view name) {
  if (name == "literal") return ProcessingMode::kLiteral;
  if (name == "disabled") return ProcessingMode::kDisabled;
  throw ValidationError("expected literal or disabled, got '" + std::string(name) + "'",
                        "processing_mode");
}

ThroughputMode parse_throughput_mode(std::string_view name) {
  if (name == "paper") return ThroughputMode::kPaper;
  if (name == "carried-capped") return ThroughputMode::kCarriedCapped;
  if (name == "literal-eq9") return ThroughputMode::kLiteralEq9;
  throw ValidationError(
      "expected paper, carried-capped or literal-eq9, got '" + std::string(name) + "'",
      "throughput_mode");
}

double total_request_rate(double per_user_rps, UserCount n) {
  return per_user_rps * static_cast<double>(n);
}

double traffic_intensity(double packet_size_bits, double r_total_rps, double bandwidth_bps) {
  return packet_size_bits * r_total_rps / bandwidth_bps;
}

double queuing_delay(double rho, double service_time_s, std::uint64_t queue_limit,
                     const ModelModes& modes) {
  if (rho >= 1.0) {
    if (modes.saturation_policy == SaturationPolicy::kInfinite) return kInf;
    return static_cast<double>(queue_limit) * service_time_s;
  }
  const double in_service_units = rho / (1.0 - rho);
  if (modes.queue_delay_mode == QueueDelayMode::kLiteralSeconds) return in_service_units;
  return in_service_units * service_time_s;
}

double processing_delay(double r_served_rps, double capacity_rps, const ModelModes& modes) {
  if (modes.processing_mode == ProcessingMode::kDisabled) return 0.0;
  return r_served_rps / capacity_rps;
}

double transmission_delay(double packet_size_bits, double bandwidth_bps) {
  return packet_size_bits / bandwidth_bps;
}

double propagation_delay(double length_m, double speed_mps) { return length_m / speed_mps; }

double total_delay(double queue_s, double processing_s, double transmission_s,
                   double propagation_s) {
  return propagation_s + transmission_s + queue_s + processing_s;
}

ServedSplit served_rate_and_server_drops(double r_total_rps, double capacity_rps) {
  double served = std::min(r_total_rps, capacity_rps);
  if (served == r_total_rps) return {served, 0.0};
  double dropped = 0.0;
  while (!conserving_remainder(served, r_total_rps, dropped)) {
    served = std::nextafter(served, 0.0);
  }
  return {served, dropped};
}

double server_utilization(double r_served_rps, double capacity_rps) {
  return r_served_rps / capacity_rps * 100.0;
}

double queue_drops(double r_total_rps, double bandwidth_bps, double packet_size_bits,
                   std::uint64_t queue_limit) {
  const double excess = r_total_rps - bandwidth_bps / packet_size_bits;
  return std::max(0.0, std::min(excess, static_cast<double>(queue_limit)));
}

double throughput(double r_served_rps, double packet_size_bits, double total_delay_s,
                  double bandwidth_bps, bool saturated, const ModelModes& modes) {
  const double offered_bps = r_served_rps * packet_size_bits;
  switch (modes.throughput_mode) {
    case ThroughputMode::kPaper:
      return saturated ? 0.0 : std::min(offered_bps, bandwidth_bps);
    case ThroughputMode::kCarriedCapped:
      return std::min(offered_bps, bandwidth_bps);
    case ThroughputMode::kLiteralEq9:
      if (std::isinf(total_delay_s)) return 0.0;
      return offered_bps / total_delay_s;
  }
  return 0.0;
}

PerformanceMetrics evaluate_point(const NetworkConfig& config, const ModelModes& modes,
                                  UserCount n) {
  config.validate();

  PerformanceMetrics m;
  m.n_users = n;
  m.r_total_rps = total_request_rate(config.per_user_request_rate_rps, n);
  m.rho = traffic_intensity(config.packet_size_bits, m.r_total_rps, config.bandwidth_bps);
  m.saturated = m.rho >= 1.0;

  const auto split = served_rate_and_server_drops(m.r_total_rps, config.server_capacity_rps);
  m.r_served_rps = split.served_rps;
  m.server_drops_rps = split.dropped_rps;

  auto& d = m.delays;
  d.queue_s = queuing_delay(m.rho, config.service_time_s(), config.queue_limit_packets, modes);
  d.processing_s = processing_delay(m.r_served_rps, config.server_capacity_rps, modes);
  d.transmission_s = transmission_delay(config.packet_size_bits, config.bandwidth_bps);
  d.propagation_s = propagation_delay(config.cable_length_m, config.propagation_speed_mps);
  d.total_s = total_delay(d.queue_s, d.processing_s, d.transmission_s, d.propagation_s);

  m.utilization_pct = server_utilization(m.r_served_rps, config.server_capacity_rps);
  m.throughput_bps = throughput(m.r_served_rps, config.packet_size_bits, d.total_s,
                                config.bandwidth_bps, m.saturated, modes);
  m.queue_drops_pps = queue_drops(m.r_total_rps, config.bandwidth_bps, config.packet_size_bits,
                                  config.queue_limit_packets);
  return m;
}

}  // namespace capplan

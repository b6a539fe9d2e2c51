#pragma once

// Discrete-event simulation of one bottleneck link: Poisson arrivals, a FIFO
// waiting room of K packets, and a single transmitter. Used to check the
// analytic queueing delay and drop formulas independently.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace capplan::des {

enum class ServiceDistribution { kExponential, kDeterministic };

std::string_view to_string(ServiceDistribution d);
ServiceDistribution parse_service_distribution(std::string_view name);

struct SimConfig {
  double arrival_rate_rps = 4170.0;
  double mean_service_time_s = 1.2e-4;
  ServiceDistribution service_distribution = ServiceDistribution::kExponential;
  std::uint64_t queue_capacity_packets = 1000;  // waiting room; excludes the packet in service
  std::uint64_t warmup_arrivals = 100000;
  std::uint64_t measured_arrivals = 1000000;
  std::uint64_t rng_seed = 1;

  // Warmup set to 10% of the measured arrivals.
  static SimConfig with_default_warmup(double arrival_rate_rps, double mean_service_time_s,
                                       std::uint64_t queue_capacity_packets,
                                       std::uint64_t measured_arrivals, std::uint64_t seed);

  void validate() const;
};

inline constexpr std::string_view kGeneratorName = "mt19937_64";

struct SimStats {
  double mean_wait_s = 0.0;
  double mean_system_time_s = 0.0;
  double drop_rate_pps = 0.0;
  double drop_fraction = 0.0;
  double observed_utilization = 0.0;
  std::uint64_t sample_count = 0;  // measured arrivals that entered the queue

  // Whole-run bookkeeping, warmup included.
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
  std::uint64_t drops = 0;
  std::uint64_t in_system_at_end = 0;

  std::string generator{kGeneratorName};

  friend bool operator==(const SimStats&, const SimStats&) = default;
};

SimStats simulate_queue(const SimConfig& sim);

struct QuantityCheck {
  std::string name;
  double observed = 0.0;
  double predicted = 0.0;
  double rel_tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<QuantityCheck> checks;  // "mean_wait_s", "drop_rate_pps"
  bool all_pass() const;
};

inline constexpr double kZeroPredictionGuard = 1e-12;

// pass iff |observed - predicted| <= rel_tolerance * max(predicted, 1e-12).
bool within_tolerance(double observed, double predicted, double rel_tolerance);

ValidationReport validate_against_analytic(const SimStats& stats, double predicted_wait_s,
                                           double predicted_drop_pps, double rel_tolerance);

}  // namespace capplan::des

#include "capplan/des.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>

#include "capplan/errors.hpp"

namespace capplan::des {

namespace {

// Inverse-CDF sampling on a 53-bit uniform, so a seed reproduces the same
// stream regardless of the standard library's distribution implementations.
class ExponentialSource {
 public:
  explicit ExponentialSource(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double exponential(double mean) { return -std::log1p(-uniform()) * mean; }

 private:
  std::mt19937_64 engine_;
};

struct InService {
  double start;
  double departure;
};

double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace

std::string_view to_string(ServiceDistribution d) {
  return d == ServiceDistribution::kExponential ? "exponential" : "deterministic";
}

ServiceDistribution parse_service_distribution(std::string_view name) {
  if (name == "exponential") return ServiceDistribution::kExponential;
  if (name == "deterministic") return ServiceDistribution::kDeterministic;
  throw ValidationError("expected exponential or deterministic, got '" + std::string(name) + "'",
                        "service_distribution");
}

SimConfig SimConfig::with_default_warmup(double arrival_rate_rps, double mean_service_time_s,
                                         std::uint64_t queue_capacity_packets,
                                         std::uint64_t measured_arrivals, std::uint64_t seed) {
  SimConfig c;
  c.arrival_rate_rps = arrival_rate_rps;
  c.mean_service_time_s = mean_service_time_s;
  c.queue_capacity_packets = queue_capacity_packets;
  c.measured_arrivals = measured_arrivals;
  c.warmup_arrivals = measured_arrivals / 10;
  c.rng_seed = seed;
  return c;
}

void SimConfig::validate() const {
  if (!(std::isfinite(arrival_rate_rps) && arrival_rate_rps > 0))
    throw ValidationError("must be > 0", "arrival_rate_rps");
  if (!(std::isfinite(mean_service_time_s) && mean_service_time_s > 0))
    throw ValidationError("must be > 0", "mean_service_time_s");
  if (measured_arrivals == 0) throw ValidationError("must be > 0", "measured_arrivals");
}

SimStats simulate_queue(const SimConfig& sim) {
  sim.validate();

  ExponentialSource rng(sim.rng_seed);
  const double mean_interarrival = 1.0 / sim.arrival_rate_rps;
  auto draw_service = [&] {
    return sim.service_distribution == ServiceDistribution::kExponential
               ? rng.exponential(sim.mean_service_time_s)
               : sim.mean_service_time_s;
  };

  // Packets in the system in FIFO order; front() is in service.
  std::deque<InService> system;
  const std::uint64_t system_limit = sim.queue_capacity_packets + 1;
  const std::uint64_t total_arrivals = sim.warmup_arrivals + sim.measured_arrivals;

  SimStats stats;
  double window_start = 0.0;
  bool measuring = false;
  double busy_time = 0.0;
  double wait_sum = 0.0;
  double system_time_sum = 0.0;
  std::uint64_t measured_drops = 0;

  double next_arrival = rng.exponential(mean_interarrival);
  for (std::uint64_t i = 0; i < total_arrivals; ++i) {
    const double now = next_arrival;

    // Departures at or before this arrival go first.
    while (!system.empty() && system.front().departure <= now) {
      const auto& done = system.front();
      if (measuring) busy_time += overlap(done.start, done.departure, window_start, done.departure);
      system.pop_front();
      ++stats.departures;
    }

    if (i == sim.warmup_arrivals) {
      measuring = true;
      window_start = now;
    }
    ++stats.arrivals;

    if (system.size() >= system_limit) {
      ++stats.drops;
      if (measuring) ++measured_drops;
    } else {
      const double start = system.empty() ? now : system.back().departure;
      const double service = draw_service();
      system.push_back({start, start + service});
      if (measuring) {
        ++stats.sample_count;
        wait_sum += start - now;
        system_time_sum += start - now + service;
      }
    }

    next_arrival = now + rng.exponential(mean_interarrival);
  }

  const double window_end = next_arrival;
  for (const auto& p : system) busy_time += overlap(p.start, p.departure, window_start, window_end);
  stats.in_system_at_end = system.size();

  const double window = window_end - window_start;
  if (stats.sample_count > 0) {
    stats.mean_wait_s = wait_sum / static_cast<double>(stats.sample_count);
    stats.mean_system_time_s = system_time_sum / static_cast<double>(stats.sample_count);
  }
  stats.drop_rate_pps = static_cast<double>(measured_drops) / window;
  stats.drop_fraction =
      static_cast<double>(measured_drops) / static_cast<double>(sim.measured_arrivals);
  stats.observed_utilization = std::clamp(busy_time / window, 0.0, 1.0);
  return stats;
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

bool within_tolerance(double observed, double predicted, double rel_tolerance) {
  return std::abs(observed - predicted) <=
         rel_tolerance * std::max(predicted, kZeroPredictionGuard);
}

ValidationReport validate_against_analytic(const SimStats& stats, double predicted_wait_s,
                                           double predicted_drop_pps, double rel_tolerance) {
  if (!(rel_tolerance > 0)) throw ValidationError("must be > 0", "rel_tolerance");
  ValidationReport report;
  report.checks.push_back({"mean_wait_s", stats.mean_wait_s, predicted_wait_s, rel_tolerance,
                           within_tolerance(stats.mean_wait_s, predicted_wait_s, rel_tolerance)});
  report.checks.push_back(
      {"drop_rate_pps", stats.drop_rate_pps, predicted_drop_pps, rel_tolerance,
       within_tolerance(stats.drop_rate_pps, predicted_drop_pps, rel_tolerance)});
  return report;
}

}  // namespace capplan::des

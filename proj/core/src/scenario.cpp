#include "capplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "capplan/errors.hpp"

namespace capplan {

namespace {

bool positive(const std::optional<double>& v) { return !v || (std::isfinite(*v) && *v > 0); }

void keep_first(std::optional<UserCount>& slot, UserCount n) {
  if (!slot) slot = n;
}

}  // namespace

void UpgradePlan::validate() const {
  if (const auto* abs = std::get_if<AbsoluteBandwidth>(&bandwidth)) {
    if (!(std::isfinite(abs->bps) && abs->bps > 0))
      throw ValidationError("must be > 0", "upgrade.bandwidth_bps");
  }
  if (const auto* f = std::get_if<BandwidthFactor>(&bandwidth)) {
    if (!(std::isfinite(f->factor) && f->factor > 0))
      throw ValidationError("must be > 0", "upgrade.bandwidth_factor");
  }
  if (!(std::isfinite(queue_scale_factor) && queue_scale_factor >= 1.0))
    throw ValidationError("must be >= 1", "upgrade.queue_scale_factor");
  if (!positive(server_capacity_new_rps))
    throw ValidationError("must be > 0", "upgrade.server_capacity_new_rps");
}

void ThresholdCriteria::validate() const {
  if (!positive(max_total_delay_s))
    throw ValidationError("must be > 0", "criteria.max_total_delay_s");
  if (!positive(min_per_user_throughput_bps))
    throw ValidationError("must be > 0", "criteria.min_per_user_throughput_bps");
  if (!positive(min_fraction_of_max_throughput) ||
      (min_fraction_of_max_throughput && *min_fraction_of_max_throughput > 1.0))
    throw ValidationError("must be in (0, 1]", "criteria.min_fraction_of_max_throughput");
  if (!positive(max_utilization_pct))
    throw ValidationError("must be > 0", "criteria.max_utilization_pct");
  if (!positive(max_drop_rate_pps))
    throw ValidationError("must be > 0", "criteria.max_drop_rate_pps");
}

NetworkConfig apply_upgrade(const NetworkConfig& config, const UpgradePlan& plan) {
  config.validate();
  plan.validate();

  NetworkConfig out = config;
  if (const auto* abs = std::get_if<AbsoluteBandwidth>(&plan.bandwidth)) {
    out.bandwidth_bps = abs->bps;
  } else if (const auto* f = std::get_if<BandwidthFactor>(&plan.bandwidth)) {
    out.bandwidth_bps = config.bandwidth_bps * f->factor;
  }
  const double scaled =
      std::floor(static_cast<double>(config.queue_limit_packets) * plan.queue_scale_factor);
  if (!(scaled < 0x1p64)) throw ValidationError("scaled queue limit overflows", "upgrade.queue_scale_factor");
  out.queue_limit_packets = static_cast<std::uint64_t>(scaled);
  if (plan.server_capacity_new_rps) out.server_capacity_rps = *plan.server_capacity_new_rps;

  out.validate();
  return out;
}

SweepResult sweep(const NetworkConfig& config, const ModelModes& modes, UserCount n_from,
                  UserCount n_to) {
  if (n_from > n_to) {
    throw ValidationError("n_from (" + std::to_string(n_from) + ") exceeds n_to (" +
                              std::to_string(n_to) + ")",
                          "sweep");
  }
  config.validate();

  SweepResult result{config, modes, {}};
  result.points.reserve(static_cast<std::size_t>(n_to - n_from + 1));
  for (UserCount n = n_from;; ++n) {
    result.points.push_back(evaluate_point(config, modes, n));
    if (n == n_to) break;
  }
  return result;
}

ThresholdReport find_threshold(const SweepResult& sweep, const ThresholdCriteria& criteria) {
  if (sweep.points.empty()) throw ValidationError("sweep has no points", "sweep");
  criteria.validate();

  ThresholdReport report;
  const double bandwidth = sweep.config.bandwidth_bps;
  for (const auto& p : sweep.points) {
    const UserCount n = p.n_users;
    if (criteria.max_total_delay_s && !(p.delays.total_s < *criteria.max_total_delay_s))
      keep_first(report.delay_violation_at, n);
    if (criteria.min_per_user_throughput_bps && n > 0 &&
        p.throughput_bps / static_cast<double>(n) < *criteria.min_per_user_throughput_bps)
      keep_first(report.per_user_throughput_violation_at, n);
    if (criteria.min_fraction_of_max_throughput &&
        p.throughput_bps < *criteria.min_fraction_of_max_throughput * bandwidth)
      keep_first(report.fraction_of_max_violation_at, n);
    if (criteria.max_utilization_pct && p.utilization_pct > *criteria.max_utilization_pct)
      keep_first(report.utilization_violation_at, n);
    if (criteria.max_drop_rate_pps &&
        p.queue_drops_pps + p.server_drops_rps > *criteria.max_drop_rate_pps)
      keep_first(report.drop_rate_violation_at, n);
  }

  for (const auto& v :
       {report.delay_violation_at, report.per_user_throughput_violation_at,
        report.fraction_of_max_violation_at, report.utilization_violation_at,
        report.drop_rate_violation_at}) {
    if (v && (!report.upgrade_required_at || *v < *report.upgrade_required_at))
      report.upgrade_required_at = v;
  }
  return report;
}

double metric_delta(double baseline, double upgraded) {
  if (baseline == upgraded) return 0.0;
  return upgraded - baseline;
}

ComparisonResult compare(const SweepResult& baseline, const SweepResult& upgraded) {
  const auto& b = baseline.points;
  const auto& u = upgraded.points;
  const bool same_range = b.size() == u.size() &&
                          std::equal(b.begin(), b.end(), u.begin(), [](const auto& x, const auto& y) {
                            return x.n_users == y.n_users;
                          });
  if (!same_range) throw ValidationError("baseline and upgraded sweeps cover different n ranges", "compare");

  ComparisonResult result{baseline, upgraded, {}};
  result.deltas.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& x = b[i];
    const auto& y = u[i];
    MetricDeltas d;
    d.n_users = x.n_users;
    d.rho = metric_delta(x.rho, y.rho);
    d.r_total_rps = metric_delta(x.r_total_rps, y.r_total_rps);
    d.r_served_rps = metric_delta(x.r_served_rps, y.r_served_rps);
    d.d_queue_s = metric_delta(x.delays.queue_s, y.delays.queue_s);
    d.d_processing_s = metric_delta(x.delays.processing_s, y.delays.processing_s);
    d.d_transmission_s = metric_delta(x.delays.transmission_s, y.delays.transmission_s);
    d.d_propagation_s = metric_delta(x.delays.propagation_s, y.delays.propagation_s);
    d.d_total_s = metric_delta(x.delays.total_s, y.delays.total_s);
    d.utilization_pct = metric_delta(x.utilization_pct, y.utilization_pct);
    d.throughput_bps = metric_delta(x.throughput_bps, y.throughput_bps);
    d.queue_drops_pps = metric_delta(x.queue_drops_pps, y.queue_drops_pps);
    d.server_drops_rps = metric_delta(x.server_drops_rps, y.server_drops_rps);
    d.saturated = static_cast<int>(y.saturated) - static_cast<int>(x.saturated);
    result.deltas.push_back(d);
  }
  return result;
}

}  // namespace capplan

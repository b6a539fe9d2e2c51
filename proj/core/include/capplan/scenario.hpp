#pragma once

// Upgrade plans, user-count sweeps, baseline/upgrade comparison and
// upgrade-threshold detection on top of the analytic model.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "capplan/model.hpp"

namespace capplan {

struct AbsoluteBandwidth {
  double bps = 0.0;
  friend bool operator==(const AbsoluteBandwidth&, const AbsoluteBandwidth&) = default;
};

struct BandwidthFactor {
  double factor = 1.0;
  friend bool operator==(const BandwidthFactor&, const BandwidthFactor&) = default;
};

using BandwidthChange = std::variant<std::monostate, AbsoluteBandwidth, BandwidthFactor>;

struct UpgradePlan {
  BandwidthChange bandwidth;
  double queue_scale_factor = 5.0;
  std::optional<double> server_capacity_new_rps;

  // 100 Mbps -> 1 Gbps with a 5x queue.
  static UpgradePlan paper_default() { return {AbsoluteBandwidth{1e9}, 5.0, std::nullopt}; }

  // Leaves every field of a config unchanged.
  static UpgradePlan identity() { return {std::monostate{}, 1.0, std::nullopt}; }

  void validate() const;

  friend bool operator==(const UpgradePlan&, const UpgradePlan&) = default;
};

struct ThresholdCriteria {
  std::optional<double> max_total_delay_s = 0.1;
  std::optional<double> min_per_user_throughput_bps = 5e6;
  std::optional<double> min_fraction_of_max_throughput;
  std::optional<double> max_utilization_pct;
  std::optional<double> max_drop_rate_pps;

  void validate() const;

  friend bool operator==(const ThresholdCriteria&, const ThresholdCriteria&) = default;
};

struct SweepResult {
  NetworkConfig config;
  ModelModes modes;
  std::vector<PerformanceMetrics> points;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

struct ThresholdReport {
  std::optional<UserCount> delay_violation_at;
  std::optional<UserCount> per_user_throughput_violation_at;
  std::optional<UserCount> fraction_of_max_violation_at;
  std::optional<UserCount> utilization_violation_at;
  std::optional<UserCount> drop_rate_violation_at;
  std::optional<UserCount> upgrade_required_at;

  friend bool operator==(const ThresholdReport&, const ThresholdReport&) = default;
};

// upgraded - baseline for every numeric metric at one user count.
struct MetricDeltas {
  UserCount n_users = 0;
  double rho = 0.0;
  double r_total_rps = 0.0;
  double r_served_rps = 0.0;
  double d_queue_s = 0.0;
  double d_processing_s = 0.0;
  double d_transmission_s = 0.0;
  double d_propagation_s = 0.0;
  double d_total_s = 0.0;
  double utilization_pct = 0.0;
  double throughput_bps = 0.0;
  double queue_drops_pps = 0.0;
  double server_drops_rps = 0.0;
  int saturated = 0;  // -1, 0 or +1

  friend bool operator==(const MetricDeltas&, const MetricDeltas&) = default;
};

struct ComparisonResult {
  SweepResult baseline;
  SweepResult upgraded;
  std::vector<MetricDeltas> deltas;
};

NetworkConfig apply_upgrade(const NetworkConfig& config, const UpgradePlan& plan);

// One point per user count in [n_from, n_to], step 1.
SweepResult sweep(const NetworkConfig& config, const ModelModes& modes, UserCount n_from,
                  UserCount n_to);

// Linear scan for the first violating user count of each active criterion.
ThresholdReport find_threshold(const SweepResult& sweep, const ThresholdCriteria& criteria);

// Difference that treats equal infinities as no change.
double metric_delta(double baseline, double upgraded);

ComparisonResult compare(const SweepResult& baseline, const SweepResult& upgraded);

}  // namespace capplan

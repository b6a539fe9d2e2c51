#pragma once

// Scenario documents in, CSV tables and SVG plots out.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "capplan/model.hpp"
#include "capplan/scenario.hpp"

namespace capplan::report {

struct SweepRange {
  UserCount from = 0;
  UserCount to = 0;
  friend bool operator==(const SweepRange&, const SweepRange&) = default;
};

// A JSON object with sections "network", "modes", "upgrade", "criteria" and
// "sweep". Only "sweep" ({"from": n, "to": n}) is required; omitted sections
// take the baseline constants, default modes and default criteria.
struct ScenarioDocument {
  NetworkConfig network;
  ModelModes modes;
  std::optional<UpgradePlan> upgrade;
  ThresholdCriteria criteria;
  SweepRange sweep;

  friend bool operator==(const ScenarioDocument&, const ScenarioDocument&) = default;
};

// "section.key=value" applied to the parsed tree before validation. The
// value is read as a JSON literal when it parses as one, else as a string.
struct Override {
  std::string path;
  std::string value;
};

Override parse_override(std::string_view assignment);

// Throws ParseError on malformed syntax and ValidationError on unknown keys,
// missing sweep range or any invariant violation.
ScenarioDocument parse_scenario(std::string_view text, const std::vector<Override>& overrides = {});

// Canonical JSON rendering; parse_scenario(serialize_scenario(d)) == d.
std::string serialize_scenario(const ScenarioDocument& doc);

// Shortest round-trip decimal or scientific form; "inf" / "-inf" for infinities.
std::string format_real(double value);

inline constexpr std::string_view kCsvHeader =
    "n_users,rho,r_total_rps,r_served_rps,d_queue_s,d_processing_s,d_transmission_s,"
    "d_propagation_s,d_total_s,utilization_pct,throughput_bps,queue_drops_pps,"
    "server_drops_rps,saturated";

std::string csv_row(const PerformanceMetrics& p);
std::string write_csv(const SweepResult& sweep);

// Same columns as write_csv, each holding upgraded - baseline.
std::string write_delta_csv(const ComparisonResult& comparison);

// Plottable CSV columns (everything except n_users) with their units.
struct MetricInfo {
  std::string_view name;
  std::string_view unit;
};
const std::vector<MetricInfo>& plottable_metrics();

double metric_value(const PerformanceMetrics& p, std::string_view metric);

// Standalone SVG: one polyline per sweep, labelled axes, a legend when an
// upgraded sweep is given. Infinite values are drawn at the ceiling and
// marked with class "clipped". Throws ValidationError on an unknown metric.
std::string render_plot(const SweepResult& baseline, const SweepResult* upgraded,
                        std::string_view metric);

}  // namespace capplan::report

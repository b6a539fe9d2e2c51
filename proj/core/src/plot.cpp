#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "capplan/errors.hpp"
#include "capplan/report.hpp"

namespace capplan::report {

namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 500;
constexpr double kLeft = 90;
constexpr double kRight = 30;
constexpr double kTop = 40;
constexpr double kBottom = 60;
constexpr int kTicks = 5;

struct Series {
  const SweepResult* sweep;
  std::string_view label;
  std::string_view color;
};

std::string num(double v) {
  // Two decimals are plenty for pixel coordinates.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

const std::vector<MetricInfo>& plottable_metrics() {
  static const std::vector<MetricInfo> metrics = {
      {"rho", "dimensionless"},       {"r_total_rps", "requests/s"},
      {"r_served_rps", "requests/s"}, {"d_queue_s", "s"},
      {"d_processing_s", "s"},        {"d_transmission_s", "s"},
      {"d_propagation_s", "s"},       {"d_total_s", "s"},
      {"utilization_pct", "%"},       {"throughput_bps", "bits/s"},
      {"queue_drops_pps", "packets/s"}, {"server_drops_rps", "requests/s"},
      {"saturated", "0/1"}};
  return metrics;
}

double metric_value(const PerformanceMetrics& p, std::string_view metric) {
  if (metric == "rho") return p.rho;
  if (metric == "r_total_rps") return p.r_total_rps;
  if (metric == "r_served_rps") return p.r_served_rps;
  if (metric == "d_queue_s") return p.delays.queue_s;
  if (metric == "d_processing_s") return p.delays.processing_s;
  if (metric == "d_transmission_s") return p.delays.transmission_s;
  if (metric == "d_propagation_s") return p.delays.propagation_s;
  if (metric == "d_total_s") return p.delays.total_s;
  if (metric == "utilization_pct") return p.utilization_pct;
  if (metric == "throughput_bps") return p.throughput_bps;
  if (metric == "queue_drops_pps") return p.queue_drops_pps;
  if (metric == "server_drops_rps") return p.server_drops_rps;
  if (metric == "saturated") return p.saturated ? 1.0 : 0.0;

  std::string valid;
  for (const auto& m : plottable_metrics()) {
    if (!valid.empty()) valid += ", ";
    valid += m.name;
  }
  throw ValidationError("unknown metric '" + std::string(metric) + "'; valid: " + valid, "metric");
}

std::string render_plot(const SweepResult& baseline, const SweepResult* upgraded,
                        std::string_view metric) {
  std::vector<Series> series{{&baseline, "baseline", "#1f77b4"}};
  if (upgraded) series.push_back({upgraded, "upgraded", "#d62728"});

  std::string_view unit;
  for (const auto& m : plottable_metrics())
    if (m.name == metric) unit = m.unit;
  if (unit.empty()) (void)metric_value(PerformanceMetrics{}, metric);  // throws with the valid list

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = 0.0;
  double y_max = 0.0;
  for (const auto& s : series) {
    if (s.sweep->points.empty()) throw ValidationError("sweep has no points", "sweep");
    for (const auto& p : s.sweep->points) {
      x_min = std::min(x_min, static_cast<double>(p.n_users));
      x_max = std::max(x_max, static_cast<double>(p.n_users));
      const double v = metric_value(p, metric);
      if (std::isfinite(v)) {
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
      }
    }
  }
  if (x_max == x_min) {
    x_min -= 1;
    x_max += 1;
  }
  // Infinite points sit on the ceiling, a little above the largest finite value.
  double ceiling = y_max > 0 ? y_max * 1.1 : 1.0;
  if (ceiling <= y_min) ceiling = y_min + 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - (y - y_min) / (ceiling - y_min) * plot_h; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  svg += "<title>" + std::string(metric) + " vs n_users</title>\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes and ticks.
  svg += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" +
         num(kLeft + plot_w) + "\" y2=\"" + num(kTop + plot_h) + "\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
         "\" y2=\"" + num(kTop + plot_h) + "\"/>\n";
  svg += "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = x_min + (x_max - x_min) * i / kTicks;
    const double yv = y_min + (ceiling - y_min) * i / kTicks;
    svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kTop + plot_h + 16) +
           "\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(yv) + 4) +
           "\" text-anchor=\"end\">" + tick_label(yv) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "<text class=\"x-label\" x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 15) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">n_users (users)</text>\n";
  svg += "<text class=\"y-label\" x=\"20\" y=\"" + num(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 " +
         num(kTop + plot_h / 2) + ")\">" + std::string(metric) + " (" + std::string(unit) +
         ")</text>\n";

  bool any_clipped = false;
  for (const auto& s : series) {
    std::string points;
    std::string markers;
    for (const auto& p : s.sweep->points) {
      const double v = metric_value(p, metric);
      const bool clipped = std::isinf(v);
      const double y = clipped ? (v > 0 ? ceiling : y_min) : v;
      if (!points.empty()) points += ' ';
      points += num(px(static_cast<double>(p.n_users))) + "," + num(py(y));
      if (clipped) {
        any_clipped = true;
        markers += "<circle class=\"clipped\" data-n=\"" + std::to_string(p.n_users) + "\" cx=\"" +
                   num(px(static_cast<double>(p.n_users))) + "\" cy=\"" + num(py(y)) +
                   "\" r=\"3\" fill=\"none\" stroke=\"" + std::string(s.color) + "\"/>\n";
      }
    }
    svg += "<polyline class=\"series\" data-label=\"" + std::string(s.label) +
           "\" fill=\"none\" stroke=\"" + std::string(s.color) + "\" stroke-width=\"2\" points=\"" +
           points + "\"/>\n";
    svg += markers;
  }

  if (any_clipped) {
    svg += "<text class=\"clip-note\" x=\"" + num(kLeft + 8) + "\" y=\"" + num(kTop - 12) +
           "\" font-family=\"sans-serif\" font-size=\"11\">circled points are infinite, drawn at the ceiling</text>\n";
  }

  if (series.size() > 1) {
    svg += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    double y = kTop + 10;
    for (const auto& s : series) {
      svg += "<rect x=\"" + num(kLeft + plot_w - 110) + "\" y=\"" + num(y - 9) +
             "\" width=\"12\" height=\"12\" fill=\"" + std::string(s.color) + "\"/>\n";
      svg += "<text x=\"" + num(kLeft + plot_w - 92) + "\" y=\"" + num(y + 1) + "\">" +
             std::string(s.label) + "</text>\n";
      y += 18;
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace capplan::report

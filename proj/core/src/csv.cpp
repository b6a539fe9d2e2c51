#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "capplan/errors.hpp"
#include "capplan/report.hpp"

namespace capplan::report {

std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string csv_row(const PerformanceMetrics& p) {
  std::string row = std::to_string(p.n_users);
  for (double v : {p.rho, p.r_total_rps, p.r_served_rps, p.delays.queue_s, p.delays.processing_s,
                   p.delays.transmission_s, p.delays.propagation_s, p.delays.total_s,
                   p.utilization_pct, p.throughput_bps, p.queue_drops_pps, p.server_drops_rps}) {
    row += ',';
    row += format_real(v);
  }
  row += p.saturated ? ",true" : ",false";
  return row;
}

std::string write_csv(const SweepResult& sweep) {
  if (sweep.points.empty()) throw ValidationError("sweep has no points", "sweep");
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& p : sweep.points) {
    out += csv_row(p);
    out += '\n';
  }
  return out;
}

std::string write_delta_csv(const ComparisonResult& comparison) {
  if (comparison.deltas.empty()) throw ValidationError("comparison has no points", "compare");
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& d : comparison.deltas) {
    out += std::to_string(d.n_users);
    for (double v : {d.rho, d.r_total_rps, d.r_served_rps, d.d_queue_s, d.d_processing_s,
                     d.d_transmission_s, d.d_propagation_s, d.d_total_s, d.utilization_pct,
                     d.throughput_bps, d.queue_drops_pps, d.server_drops_rps}) {
      out += ',';
      out += format_real(v);
    }
    out += ',';
    out += std::to_string(d.saturated);
    out += '\n';
  }
  return out;
}

}  // namespace capplan::report

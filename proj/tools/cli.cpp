#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "capplan/capplan.hpp"

namespace capplan::cli {

namespace {

const std::vector<std::string> kDefaultPlotMetrics = {"d_total_s", "throughput_bps",
                                                      "queue_drops_pps", "utilization_pct"};

struct Options {
  std::string scenario;
  std::vector<std::string> sets;
  std::string out;
  bool plot = false;
  std::vector<std::string> metrics;
  std::string plot_prefix;
  std::optional<UserCount> users;
  std::optional<UserCount> from;
  std::optional<UserCount> to;
  bool upgraded = false;
  std::optional<std::uint64_t> seed;
  std::uint64_t arrivals = 1000000;
  std::optional<std::uint64_t> warmup;
  std::string service = "exponential";
  double tolerance = 0.05;
};

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content) || !out.flush()) throw IoError("cannot write '" + path + "'");
}

report::ScenarioDocument load_document(const Options& o, std::vector<report::Override> extra = {}) {
  const std::string text = o.scenario.empty() ? std::string("{}") : read_file(o.scenario);
  std::vector<report::Override> overrides;
  for (const auto& s : o.sets) overrides.push_back(report::parse_override(s));
  for (auto& e : extra) overrides.push_back(std::move(e));
  return report::parse_scenario(text, overrides);
}

std::vector<report::Override> range_overrides(const Options& o) {
  std::vector<report::Override> r;
  if (o.from) r.push_back({"sweep.from", std::to_string(*o.from)});
  if (o.to) r.push_back({"sweep.to", std::to_string(*o.to)});
  return r;
}

std::string plot_prefix(const Options& o, const std::string& fallback) {
  if (!o.plot_prefix.empty()) return o.plot_prefix;
  if (!o.out.empty()) {
    std::filesystem::path p(o.out);
    return (p.parent_path() / p.stem()).string();
  }
  return fallback;
}

std::vector<std::string> plot_metrics(const Options& o) {
  return o.metrics.empty() ? kDefaultPlotMetrics : o.metrics;
}

std::string user_count(const std::optional<UserCount>& n) {
  return n ? std::to_string(*n) : std::string("none");
}

void print_metrics(std::ostream& out, const PerformanceMetrics& p) {
  const auto header = std::string(report::kCsvHeader);
  const auto row = report::csv_row(p);
  std::istringstream keys(header);
  std::istringstream values(row);
  std::string k;
  std::string v;
  while (std::getline(keys, k, ',') && std::getline(values, v, ',')) out << k << '=' << v << '\n';
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const UserCount n = o.users.value_or(0);
  const auto doc = load_document(o, {{"sweep.from", std::to_string(n)}, {"sweep.to", std::to_string(n)}});
  print_metrics(out, evaluate_point(doc.network, doc.modes, n));
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const auto doc = load_document(o, range_overrides(o));
  const auto result = sweep(doc.network, doc.modes, doc.sweep.from, doc.sweep.to);
  const auto csv = report::write_csv(result);
  if (o.out.empty()) {
    out << csv;
  } else {
    write_file(o.out, csv);
    err << "wrote " << o.out << " (" << result.points.size() << " points)\n";
  }
  if (o.plot) {
    const auto prefix = plot_prefix(o, "sweep");
    for (const auto& m : plot_metrics(o)) {
      const auto path = prefix + "_" + m + ".svg";
      write_file(path, report::render_plot(result, nullptr, m));
      err << "wrote " << path << '\n';
    }
  }
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  const auto doc = load_document(o, range_overrides(o));
  const auto plan = doc.upgrade.value_or(UpgradePlan::paper_default());
  const auto upgraded_config = apply_upgrade(doc.network, plan);
  const auto base = sweep(doc.network, doc.modes, doc.sweep.from, doc.sweep.to);
  const auto up = sweep(upgraded_config, doc.modes, doc.sweep.from, doc.sweep.to);
  const auto cmp = compare(base, up);

  if (o.out.empty()) {
    out << report::write_delta_csv(cmp);
  } else {
    for (const auto& [suffix, content] :
         {std::pair{"_baseline.csv", report::write_csv(base)},
          std::pair{"_upgraded.csv", report::write_csv(up)},
          std::pair{"_delta.csv", report::write_delta_csv(cmp)}}) {
      const auto path = o.out + suffix;
      write_file(path, content);
      err << "wrote " << path << '\n';
    }
  }
  if (o.plot) {
    const auto prefix = o.plot_prefix.empty() ? (o.out.empty() ? std::string("compare") : o.out)
                                              : o.plot_prefix;
    for (const auto& m : plot_metrics(o)) {
      const auto path = prefix + "_" + m + ".svg";
      write_file(path, report::render_plot(base, &up, m));
      err << "wrote " << path << '\n';
    }
  }
  return kExitOk;
}

int cmd_threshold(const Options& o, std::ostream& out) {
  const auto doc = load_document(o, range_overrides(o));
  NetworkConfig config = doc.network;
  if (o.upgraded) config = apply_upgrade(config, doc.upgrade.value_or(UpgradePlan::paper_default()));
  const auto result = sweep(config, doc.modes, doc.sweep.from, doc.sweep.to);
  const auto r = find_threshold(result, doc.criteria);
  const auto& c = doc.criteria;

  out << "# " << (o.upgraded ? "upgraded" : "baseline") << " network, users " << doc.sweep.from
      << ".." << doc.sweep.to << '\n';
  auto human = [&](const char* what, const std::optional<double>& limit,
                   const std::optional<UserCount>& at) {
    if (!limit) return;
    out << "# " << what << " " << report::format_real(*limit) << ": "
        << (at ? "first violated at n=" + std::to_string(*at) : std::string("never violated"))
        << '\n';
  };
  human("total delay must stay below (s)", c.max_total_delay_s, r.delay_violation_at);
  human("per-user throughput must be at least (bps)", c.min_per_user_throughput_bps,
        r.per_user_throughput_violation_at);
  human("throughput must be at least this fraction of bandwidth", c.min_fraction_of_max_throughput,
        r.fraction_of_max_violation_at);
  human("utilization must not exceed (%)", c.max_utilization_pct, r.utilization_violation_at);
  human("drop rate must not exceed (pps)", c.max_drop_rate_pps, r.drop_rate_violation_at);

  out << "delay_violation_at=" << user_count(r.delay_violation_at) << '\n'
      << "per_user_throughput_violation_at=" << user_count(r.per_user_throughput_violation_at) << '\n'
      << "fraction_of_max_violation_at=" << user_count(r.fraction_of_max_violation_at) << '\n'
      << "utilization_violation_at=" << user_count(r.utilization_violation_at) << '\n'
      << "drop_rate_violation_at=" << user_count(r.drop_rate_violation_at) << '\n'
      << "upgrade_required_at=" << user_count(r.upgrade_required_at) << '\n';
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<report::Override> extra;
  if (o.users) extra = {{"sweep.from", std::to_string(*o.users)}, {"sweep.to", std::to_string(*o.users)}};
  const auto doc = load_document(o, std::move(extra));
  const UserCount n = o.users.value_or(doc.sweep.to);
  const auto& net = doc.network;

  std::uint64_t seed = 0;
  if (o.seed) {
    seed = *o.seed;
  } else {
    seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) | std::random_device{}();
    err << "warning: no --seed given, results are not reproducible\n";
  }

  const double lambda = total_request_rate(net.per_user_request_rate_rps, n);
  des::SimConfig sim = des::SimConfig::with_default_warmup(
      lambda, net.service_time_s(), net.queue_limit_packets, o.arrivals, seed);
  if (o.warmup) sim.warmup_arrivals = *o.warmup;
  sim.service_distribution = des::parse_service_distribution(o.service);

  const double rho = traffic_intensity(net.packet_size_bits, lambda, net.bandwidth_bps);
  const ModelModes predict{QueueDelayMode::kServiceScaled, SaturationPolicy::kCapped,
                           ProcessingMode::kDisabled, ThroughputMode::kPaper};
  const double predicted_wait = queuing_delay(rho, net.service_time_s(), net.queue_limit_packets, predict);
  const double predicted_drop = std::max(0.0, lambda - net.bandwidth_bps / net.packet_size_bits);

  const auto stats = des::simulate_queue(sim);
  const auto report = des::validate_against_analytic(stats, predicted_wait, predicted_drop, o.tolerance);

  out << "# DES oracle vs analytic model at n=" << n << " (rho=" << report::format_real(rho) << ")\n"
      << "n_users=" << n << '\n'
      << "rho=" << report::format_real(rho) << '\n'
      << "seed=" << seed << '\n'
      << "generator=" << stats.generator << '\n'
      << "service_distribution=" << des::to_string(sim.service_distribution) << '\n'
      << "warmup_arrivals=" << sim.warmup_arrivals << '\n'
      << "measured_arrivals=" << sim.measured_arrivals << '\n'
      << "observed_utilization=" << report::format_real(stats.observed_utilization) << '\n'
      << "drop_fraction=" << report::format_real(stats.drop_fraction) << '\n';
  for (const auto& c : report.checks) {
    out << c.name << "_observed=" << report::format_real(c.observed) << '\n'
        << c.name << "_predicted=" << report::format_real(c.predicted) << '\n'
        << c.name << "_pass=" << (c.pass ? "true" : "false") << '\n';
  }
  out << "overall=" << (report.all_pass() ? "pass" : "fail") << '\n';
  return report.all_pass() ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Capacity planning for a single-bottleneck ISP network", "capplan"};
  app.require_subcommand(1);

  auto add_scenario = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "Scenario document (JSON); defaults when omitted");
    sub->add_option("--set", o.sets, "Override section.key=value after parsing")->take_all();
  };
  auto add_range = [&](CLI::App* sub) {
    sub->add_option("--from", o.from, "First user count of the sweep");
    sub->add_option("--to", o.to, "Last user count of the sweep");
  };
  auto add_plot = [&](CLI::App* sub) {
    sub->add_flag("--plot", o.plot, "Write one SVG per metric");
    sub->add_option("--metric", o.metrics, "Metric to plot (repeatable)");
    sub->add_option("--plot-prefix", o.plot_prefix, "Path prefix for SVG files");
  };

  auto* evaluate = app.add_subcommand("evaluate", "Print the metrics record for one user count");
  add_scenario(evaluate);
  evaluate->add_option("--users,-n", o.users, "User count")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Write the baseline sweep as CSV");
  add_scenario(sweep_cmd);
  add_range(sweep_cmd);
  sweep_cmd->add_option("--out,-o", o.out, "CSV output file (stdout when omitted)");
  add_plot(sweep_cmd);

  auto* compare_cmd = app.add_subcommand("compare", "Baseline vs upgraded sweeps and deltas");
  add_scenario(compare_cmd);
  add_range(compare_cmd);
  compare_cmd->add_option("--out,-o", o.out,
                          "Output prefix for _baseline.csv, _upgraded.csv, _delta.csv");
  add_plot(compare_cmd);

  auto* threshold_cmd = app.add_subcommand("threshold", "Find the user counts that require an upgrade");
  add_scenario(threshold_cmd);
  add_range(threshold_cmd);
  threshold_cmd->add_flag("--upgraded", o.upgraded, "Evaluate the upgraded network instead");

  auto* validate_cmd = app.add_subcommand("validate", "Check the queueing formulas against the DES oracle");
  add_scenario(validate_cmd);
  validate_cmd->add_option("--users,-n", o.users, "User count (defaults to sweep.to)");
  validate_cmd->add_option("--seed", o.seed, "RNG seed (required for reproducible output)");
  validate_cmd->add_option("--arrivals", o.arrivals, "Measured arrivals")->check(CLI::PositiveNumber);
  validate_cmd->add_option("--warmup", o.warmup, "Warmup arrivals (default: 10% of --arrivals)");
  validate_cmd->add_option("--service", o.service, "exponential or deterministic")
      ->check(CLI::IsMember({"exponential", "deterministic"}));
  validate_cmd->add_option("--tolerance", o.tolerance, "Relative tolerance")->check(CLI::PositiveNumber);

  auto* help_cmd = app.add_subcommand("help", "Show this help");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (help_cmd->parsed()) {
      out << app.get_formatter()->make_help(&app, "capplan", CLI::AppFormatMode::Normal);
      return kExitOk;
    }
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (sweep_cmd->parsed()) return cmd_sweep(o, out, err);
    if (compare_cmd->parsed()) return cmd_compare(o, out, err);
    if (threshold_cmd->parsed()) return cmd_threshold(o, out);
    if (validate_cmd->parsed()) return cmd_validate(o, out, err);
  } catch (const ParseError& e) {
    err << "error: scenario syntax: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace capplan::cli

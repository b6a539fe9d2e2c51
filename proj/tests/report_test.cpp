#include <gtest/gtest.h>

#include <charconv>
#include <random>
#include <regex>
#include <sstream>

#include "capplan/errors.hpp"
#include "capplan/report.hpp"

namespace capplan::report {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

SweepResult baseline(UserCount from = 1, UserCount to = 50) {
  return sweep(NetworkConfig::paper_defaults(), ModelModes{}, from, to);
}

SweepResult upgraded_sweep() {
  return sweep(apply_upgrade(NetworkConfig::paper_defaults(), UpgradePlan::paper_default()),
               ModelModes{}, 1, 50);
}

TEST(ParseScenario, SweepOnlyTakesAllDefaults) {
  const auto doc = parse_scenario(R"({"sweep": {"from": 1, "to": 50}})");
  EXPECT_EQ(doc.network, NetworkConfig::paper_defaults());
  EXPECT_EQ(doc.network.bandwidth_bps, 1e8);
  EXPECT_EQ(doc.network.packet_size_bits, 12000.0);
  EXPECT_EQ(doc.network.per_user_request_rate_rps, 417.0);
  EXPECT_EQ(doc.network.server_capacity_rps, 20850.0);
  EXPECT_EQ(doc.network.propagation_speed_mps, 2e8);
  EXPECT_EQ(doc.network.cable_length_m, 90.0);
  EXPECT_EQ(doc.network.queue_limit_packets, 1000u);
  EXPECT_EQ(doc.modes, ModelModes{});
  EXPECT_EQ(doc.criteria, ThresholdCriteria{});
  EXPECT_FALSE(doc.upgrade);
  EXPECT_EQ(doc.sweep, (SweepRange{1, 50}));
}

TEST(ParseScenario, EmptyDocumentNeedsASweepRange) {
  try {
    parse_scenario("{}");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "sweep");
  }
  EXPECT_THROW(parse_scenario(R"({"sweep": {"from": 1}})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"sweep": {"from": 9, "to": 3}})"), ValidationError);
}

TEST(ParseScenario, InvariantViolationNamesTheField) {
  try {
    parse_scenario(R"({"network": {"bandwidth_bps": -5}, "sweep": {"from": 1, "to": 2}})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "network.bandwidth_bps");
    EXPECT_NE(std::string(e.what()).find("bandwidth_bps"), std::string::npos);
  }
}

TEST(ParseScenario, UnknownKeysAreRejected) {
  EXPECT_THROW(parse_scenario(R"({"sweep": {"from": 1, "to": 2}, "extra": 1})"), ValidationError);
  try {
    parse_scenario(R"({"network": {"bandwith_bps": 1e9}, "sweep": {"from": 1, "to": 2}})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "network.bandwith_bps");
  }
}

TEST(ParseScenario, SyntaxErrorsCarryLineAndColumn) {
  try {
    parse_scenario("{\n  \"sweep\": {\"from\": 1,, \"to\": 2}\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 23u);  // the second comma
  }
  EXPECT_THROW(parse_scenario(""), ParseError);
}

TEST(ParseScenario, TypeErrors) {
  EXPECT_THROW(parse_scenario(R"({"network": {"queue_limit_packets": 2.5}, "sweep": {"from": 1, "to": 2}})"),
               ValidationError);
  EXPECT_THROW(parse_scenario(R"({"network": {"bandwidth_bps": "fast"}, "sweep": {"from": 1, "to": 2}})"),
               ValidationError);
  EXPECT_THROW(parse_scenario(R"({"modes": {"throughput_mode": "nope"}, "sweep": {"from": 1, "to": 2}})"),
               ValidationError);
  EXPECT_THROW(parse_scenario(R"({"sweep": {"from": -1, "to": 2}})"), ValidationError);
  EXPECT_THROW(parse_scenario("[1, 2]"), ValidationError);
}

TEST(ParseScenario, FullDocument) {
  const auto doc = parse_scenario(R"({
    "network": {"bandwidth_bps": 2e8, "per_user_request_rate_rps": 400, "server_capacity_users": 10,
                "queue_limit_packets": 200},
    "modes": {"queue_delay_mode": "literal-seconds", "saturation_policy": "capped",
              "processing_mode": "disabled", "throughput_mode": "literal-eq9"},
    "upgrade": {"bandwidth_factor": 4, "queue_scale_factor": 2},
    "criteria": {"max_total_delay_s": 0.05, "min_per_user_throughput_bps": null,
                 "min_fraction_of_max_throughput": 0.95},
    "sweep": {"from": 0, "to": 10}
  })");
  EXPECT_EQ(doc.network.bandwidth_bps, 2e8);
  EXPECT_EQ(doc.network.server_capacity_rps, 4000.0);  // users x per-user rate
  EXPECT_EQ(doc.network.queue_limit_packets, 200u);
  EXPECT_EQ(doc.modes.queue_delay_mode, QueueDelayMode::kLiteralSeconds);
  EXPECT_EQ(doc.modes.saturation_policy, SaturationPolicy::kCapped);
  EXPECT_EQ(doc.modes.processing_mode, ProcessingMode::kDisabled);
  EXPECT_EQ(doc.modes.throughput_mode, ThroughputMode::kLiteralEq9);
  ASSERT_TRUE(doc.upgrade);
  EXPECT_EQ(std::get<BandwidthFactor>(doc.upgrade->bandwidth).factor, 4.0);
  EXPECT_EQ(doc.upgrade->queue_scale_factor, 2.0);
  EXPECT_EQ(doc.criteria.max_total_delay_s, 0.05);
  EXPECT_FALSE(doc.criteria.min_per_user_throughput_bps);
  EXPECT_EQ(doc.criteria.min_fraction_of_max_throughput, 0.95);
}

TEST(ParseScenario, UpgradeWithBothBandwidthFormsIsRejected) {
  EXPECT_THROW(parse_scenario(R"({"upgrade": {"bandwidth_bps": 1e9, "bandwidth_factor": 10},
                                  "sweep": {"from": 1, "to": 2}})"),
               ValidationError);
  const auto empty_upgrade = parse_scenario(R"({"upgrade": {}, "sweep": {"from": 1, "to": 2}})");
  ASSERT_TRUE(empty_upgrade.upgrade);
  EXPECT_TRUE(std::holds_alternative<std::monostate>(empty_upgrade.upgrade->bandwidth));
  EXPECT_EQ(empty_upgrade.upgrade->queue_scale_factor, 5.0);
}

TEST(ParseScenario, OverridesApplyAfterParsing) {
  const auto doc = parse_scenario(R"({"sweep": {"from": 1, "to": 50}})",
                                  {parse_override("network.bandwidth_bps=1e9"),
                                   parse_override("modes.processing_mode=disabled"),
                                   parse_override("criteria.min_per_user_throughput_bps=null"),
                                   parse_override("sweep.to=20")});
  EXPECT_EQ(doc.network.bandwidth_bps, 1e9);
  EXPECT_EQ(doc.modes.processing_mode, ProcessingMode::kDisabled);
  EXPECT_FALSE(doc.criteria.min_per_user_throughput_bps);
  EXPECT_EQ(doc.sweep.to, 20u);

  const auto from_nothing = parse_scenario("{}", {{"sweep.from", "3"}, {"sweep.to", "4"}});
  EXPECT_EQ(from_nothing.sweep, (SweepRange{3, 4}));

  EXPECT_THROW(parse_scenario("{}", {{"network.nope", "1"}}), ValidationError);
  EXPECT_THROW(parse_scenario("{}", {{"nosection.key", "1"}}), ValidationError);
  EXPECT_THROW(parse_scenario("{}", {{"bandwidth_bps", "1"}}), ValidationError);
  EXPECT_THROW(parse_override("no-equals-sign"), ValidationError);
}

TEST(ParseScenario, SerializeRoundTrip) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> real(1e-3, 1e10);
  std::uniform_int_distribution<std::uint64_t> count(0, 1000000);
  for (int i = 0; i < 300; ++i) {
    ScenarioDocument doc;
    doc.network.bandwidth_bps = real(rng);
    doc.network.packet_size_bits = real(rng);
    doc.network.per_user_request_rate_rps = real(rng);
    doc.network.server_capacity_rps = real(rng);
    doc.network.server_capacity_users = real(rng);
    doc.network.propagation_speed_mps = real(rng);
    doc.network.cable_length_m = real(rng);
    doc.network.queue_limit_packets = count(rng);
    doc.modes.queue_delay_mode = i % 2 ? QueueDelayMode::kLiteralSeconds : QueueDelayMode::kServiceScaled;
    doc.modes.saturation_policy = i % 3 ? SaturationPolicy::kCapped : SaturationPolicy::kInfinite;
    doc.modes.processing_mode = i % 5 ? ProcessingMode::kDisabled : ProcessingMode::kLiteral;
    doc.modes.throughput_mode = static_cast<ThroughputMode>(i % 3);
    if (i % 4 == 1) doc.upgrade = UpgradePlan{AbsoluteBandwidth{real(rng)}, 1.0 + real(rng), std::nullopt};
    if (i % 4 == 2) doc.upgrade = UpgradePlan{BandwidthFactor{real(rng)}, 5.0, real(rng)};
    if (i % 4 == 3) doc.upgrade = UpgradePlan{std::monostate{}, 5.0, std::nullopt};
    if (i % 2) doc.criteria.min_per_user_throughput_bps.reset();
    if (i % 3 == 0) doc.criteria.min_fraction_of_max_throughput = 0.5;
    if (i % 7 == 0) doc.criteria.max_utilization_pct = real(rng);
    if (i % 11 == 0) doc.criteria.max_drop_rate_pps = real(rng);
    const auto a = count(rng);
    doc.sweep = {a, a + count(rng)};
    ASSERT_EQ(parse_scenario(serialize_scenario(doc)), doc) << serialize_scenario(doc);
  }
}

TEST(FormatReal, ShortestRoundTripAndSpecials) {
  EXPECT_EQ(format_real(0.5004), "0.5004");
  EXPECT_EQ(format_real(20.0), "20");
  EXPECT_EQ(format_real(8.0064e7), "80064000");
  EXPECT_EQ(format_real(1.2e-4), "0.00012");
  EXPECT_EQ(format_real(4.5e-7), "4.5e-07");
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_real(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_real(0.0), "0");
}

TEST(WriteCsv, HeaderIsFrozen) {
  EXPECT_EQ(kCsvHeader,
            "n_users,rho,r_total_rps,r_served_rps,d_queue_s,d_processing_s,d_transmission_s,"
            "d_propagation_s,d_total_s,utilization_pct,throughput_bps,queue_drops_pps,"
            "server_drops_rps,saturated");
  const auto csv = write_csv(baseline(1, 1));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
}

TEST(WriteCsv, OneRowPerPointNewlineTerminated) {
  const auto csv = write_csv(baseline());
  EXPECT_EQ(count(csv, "\n"), 51u);
  EXPECT_EQ(count(csv, "\r"), 0u);
  EXPECT_EQ(csv.back(), '\n');
  const auto lines = split(csv, '\n');
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    ASSERT_EQ(fields.size(), 14u);
    EXPECT_EQ(fields[0], std::to_string(i));
  }
}

TEST(WriteCsv, BaselineRowsForTenAndTwentyUsers) {
  const auto lines = split(write_csv(baseline()), '\n');
  const auto ten = split(lines[10], ',');
  EXPECT_EQ(ten[0], "10");
  EXPECT_EQ(ten[1], "0.5004");
  EXPECT_EQ(ten[9], "20");
  EXPECT_EQ(ten[13], "false");

  const auto twenty = split(lines[20], ',');
  EXPECT_EQ(twenty[4], "inf");   // d_queue_s
  EXPECT_EQ(twenty[8], "inf");   // d_total_s
  EXPECT_EQ(twenty[13], "true");
}

TEST(WriteCsv, FiniteFieldsRoundTripExactly) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    NetworkConfig c;
    c.bandwidth_bps = std::uniform_real_distribution<double>(1e6, 1e10)(rng);
    c.per_user_request_rate_rps = std::uniform_real_distribution<double>(1, 3000)(rng);
    c.server_capacity_rps = std::uniform_real_distribution<double>(1e3, 1e6)(rng);
    c.cable_length_m = std::uniform_real_distribution<double>(0, 1e5)(rng);
    for (const auto& p : sweep(c, ModelModes{}, 0, 200).points) {
      const auto fields = split(csv_row(p), ',');
      const double expected[] = {p.rho, p.r_total_rps, p.r_served_rps, p.delays.queue_s,
                                 p.delays.processing_s, p.delays.transmission_s, p.delays.propagation_s,
                                 p.delays.total_s, p.utilization_pct, p.throughput_bps,
                                 p.queue_drops_pps, p.server_drops_rps};
      for (std::size_t i = 0; i < 12; ++i) {
        if (std::isinf(expected[i])) {
          ASSERT_EQ(fields[i + 1], "inf");
          continue;
        }
        double parsed = 0;
        const auto& f = fields[i + 1];
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), parsed);
        ASSERT_EQ(ec, std::errc{});
        ASSERT_EQ(ptr, f.data() + f.size());
        ASSERT_EQ(parsed, expected[i]) << f;
      }
    }
  }
}

TEST(WriteCsv, EmptySweepIsRejected) {
  SweepResult empty{NetworkConfig::paper_defaults(), ModelModes{}, {}};
  EXPECT_THROW(write_csv(empty), ValidationError);
}

TEST(WriteDeltaCsv, SameColumnsSignedSaturation) {
  const auto cmp = compare(baseline(), upgraded_sweep());
  const auto lines = split(write_delta_csv(cmp), '\n');
  ASSERT_EQ(lines.size(), 51u);
  EXPECT_EQ(lines[0], kCsvHeader);
  const auto fifty = split(lines[50], ',');
  EXPECT_EQ(fifty[4], "-inf");
  EXPECT_EQ(fifty[11], "-1000");
  EXPECT_EQ(fifty[13], "-1");
}

TEST(RenderPlot, SingleSweepHasOnePolylineAndNoLegend) {
  const auto svg = render_plot(baseline(), nullptr, "throughput_bps");
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  EXPECT_EQ(count(svg, "class=\"legend\""), 0u);
  EXPECT_NE(svg.find("n_users (users)"), std::string::npos);
  EXPECT_NE(svg.find("throughput_bps (bits/s)"), std::string::npos);
}

TEST(RenderPlot, OverlayHasTwoPolylinesAndLegend) {
  const auto up = upgraded_sweep();
  const auto svg = render_plot(baseline(), &up, "queue_drops_pps");
  EXPECT_EQ(count(svg, "<polyline"), 2u);
  EXPECT_EQ(count(svg, "class=\"legend\""), 1u);
  EXPECT_NE(svg.find(">baseline<"), std::string::npos);
  EXPECT_NE(svg.find(">upgraded<"), std::string::npos);
}

TEST(RenderPlot, InfiniteDelaysAreClippedAndMarked) {
  const auto svg = render_plot(baseline(), nullptr, "d_total_s");
  EXPECT_EQ(count(svg, "class=\"clipped\""), 31u);
  for (int n = 20; n <= 50; ++n) EXPECT_NE(svg.find("data-n=\"" + std::to_string(n) + "\""), std::string::npos);
  EXPECT_EQ(svg.find("data-n=\"19\""), std::string::npos);
  EXPECT_EQ(svg.find("\"inf"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("e+308"), std::string::npos);
}

TEST(RenderPlot, UnknownMetricListsValidNames) {
  try {
    render_plot(baseline(), nullptr, "latency");
    FAIL();
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    for (const auto& m : plottable_metrics()) EXPECT_NE(what.find(m.name), std::string::npos);
  }
  SweepResult empty{NetworkConfig::paper_defaults(), ModelModes{}, {}};
  EXPECT_THROW(render_plot(empty, nullptr, "rho"), ValidationError);
}

TEST(RenderPlot, EveryColumnIsPlottable) {
  const auto header = split(std::string(kCsvHeader), ',');
  ASSERT_EQ(plottable_metrics().size(), header.size() - 1);
  for (std::size_t i = 1; i < header.size(); ++i) EXPECT_EQ(plottable_metrics()[i - 1].name, header[i]);
}

}  // namespace
}  // namespace capplan::report

#include <algorithm>
#include <cmath>
#include <array>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "capplan/errors.hpp"
#include "capplan/report.hpp"

namespace capplan::report {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 5> kSections = {"network", "modes", "upgrade", "criteria",
                                                     "sweep"};

const std::set<std::string, std::less<>>& known_keys(std::string_view section) {
  static const std::set<std::string, std::less<>> network = {
      "bandwidth_bps",      "packet_size_bits",      "per_user_request_rate_rps",
      "server_capacity_rps", "server_capacity_users", "propagation_speed_mps",
      "cable_length_m",     "queue_limit_packets"};
  static const std::set<std::string, std::less<>> modes = {"queue_delay_mode", "saturation_policy",
                                                          "processing_mode", "throughput_mode"};
  static const std::set<std::string, std::less<>> upgrade = {
      "bandwidth_bps", "bandwidth_factor", "queue_scale_factor", "server_capacity_new_rps"};
  static const std::set<std::string, std::less<>> criteria = {
      "max_total_delay_s", "min_per_user_throughput_bps", "min_fraction_of_max_throughput",
      "max_utilization_pct", "max_drop_rate_pps"};
  static const std::set<std::string, std::less<>> sweep = {"from", "to"};
  if (section == "network") return network;
  if (section == "modes") return modes;
  if (section == "upgrade") return upgrade;
  if (section == "criteria") return criteria;
  return sweep;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// what() without the "field: " prefix ValidationError adds.
std::string bare_message(const ValidationError& e) {
  std::string what = e.what();
  if (!e.field().empty() && what.rfind(e.field() + ": ", 0) == 0) what.erase(0, e.field().size() + 2);
  return what;
}

// Reads fields out of one section, naming "section.key" in every error.
class SectionReader {
 public:
  SectionReader(const json& root, std::string section) : section_(std::move(section)) {
    if (auto it = root.find(section_); it != root.end()) {
      if (!it->is_object()) throw ValidationError("must be an object", section_);
      node_ = &*it;
      for (const auto& [key, value] : it->items()) {
        if (!known_keys(section_).contains(key))
          throw ValidationError("unknown key", section_ + "." + key);
      }
    }
  }

  bool present() const { return node_ != nullptr; }

  bool has(const char* key) const { return node_ && node_->contains(key); }

  std::string field(const char* key) const { return section_ + "." + key; }

  double real(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = node_->at(key);
    if (!v.is_number()) throw ValidationError("must be a number", field(key));
    return v.get<double>();
  }

  // Absent keys keep the fallback; explicit null clears it.
  std::optional<double> optional_real(const char* key, std::optional<double> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = node_->at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) throw ValidationError("must be a number or null", field(key));
    return v.get<double>();
  }

  std::uint64_t count(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = node_->at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0 && d < 0x1p64 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
    }
    throw ValidationError("must be a non-negative integer", field(key));
  }

  template <typename Parse, typename T>
  T choice(const char* key, T fallback, Parse parse) const {
    if (!has(key)) return fallback;
    const auto& v = node_->at(key);
    if (!v.is_string()) throw ValidationError("must be a string", field(key));
    try {
      return parse(v.get<std::string>());
    } catch (const ValidationError& e) {
      throw ValidationError(bare_message(e), field(key));
    }
  }

  template <typename Fn>
  void rethrow_with_section(Fn&& fn) const {
    try {
      fn();
    } catch (const ValidationError& e) {
      const auto& f = e.field();
      if (f.rfind(section_ + ".", 0) == 0) throw;
      throw ValidationError(bare_message(e), f.empty() ? section_ : section_ + "." + f);
    }
  }

 private:
  std::string section_;
  const json* node_ = nullptr;
};

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string message = e.what();
    if (auto pos = message.find("syntax error"); pos != std::string::npos)
      message = message.substr(pos);
    throw ParseError(message, line, column);
  }
}

void apply_override(json& root, const Override& o) {
  const auto dot = o.path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == o.path.size() ||
      o.path.find('.', dot + 1) != std::string::npos)
    throw ValidationError("override path must be section.key", o.path);
  const std::string section = o.path.substr(0, dot);
  const std::string key = o.path.substr(dot + 1);
  if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
    throw ValidationError("unknown section", o.path);
  if (!known_keys(section).contains(key)) throw ValidationError("unknown key", o.path);

  json value;
  try {
    value = json::parse(o.value);
  } catch (const json::parse_error&) {
    value = o.value;
  }
  auto& node = root[section];
  if (node.is_null()) node = json::object();
  if (!node.is_object()) throw ValidationError("must be an object", section);
  node[key] = std::move(value);
}

ScenarioDocument from_json(const json& root) {
  if (!root.is_object()) throw ValidationError("scenario document must be a JSON object");
  for (const auto& [key, value] : root.items()) {
    if (std::find(kSections.begin(), kSections.end(), key) == kSections.end())
      throw ValidationError("unknown section", key);
  }

  ScenarioDocument doc;

  const SectionReader net(root, "network");
  auto& n = doc.network;
  n.bandwidth_bps = net.real("bandwidth_bps", n.bandwidth_bps);
  n.packet_size_bits = net.real("packet_size_bits", n.packet_size_bits);
  n.per_user_request_rate_rps = net.real("per_user_request_rate_rps", n.per_user_request_rate_rps);
  n.server_capacity_users = net.real("server_capacity_users", n.server_capacity_users);
  n.server_capacity_rps = net.real("server_capacity_rps",
                                   n.server_capacity_users * n.per_user_request_rate_rps);
  n.propagation_speed_mps = net.real("propagation_speed_mps", n.propagation_speed_mps);
  n.cable_length_m = net.real("cable_length_m", n.cable_length_m);
  n.queue_limit_packets = net.count("queue_limit_packets", n.queue_limit_packets);
  net.rethrow_with_section([&] { n.validate(); });

  const SectionReader modes(root, "modes");
  auto& m = doc.modes;
  m.queue_delay_mode = modes.choice("queue_delay_mode", m.queue_delay_mode,
                                    [](const std::string& s) { return parse_queue_delay_mode(s); });
  m.saturation_policy = modes.choice("saturation_policy", m.saturation_policy,
                                     [](const std::string& s) { return parse_saturation_policy(s); });
  m.processing_mode = modes.choice("processing_mode", m.processing_mode,
                                   [](const std::string& s) { return parse_processing_mode(s); });
  m.throughput_mode = modes.choice("throughput_mode", m.throughput_mode,
                                   [](const std::string& s) { return parse_throughput_mode(s); });

  const SectionReader up(root, "upgrade");
  if (up.present()) {
    UpgradePlan plan;
    plan.bandwidth = std::monostate{};
    if (up.has("bandwidth_bps") && up.has("bandwidth_factor"))
      throw ValidationError("give bandwidth_bps or bandwidth_factor, not both", "upgrade.bandwidth");
    if (up.has("bandwidth_bps")) plan.bandwidth = AbsoluteBandwidth{up.real("bandwidth_bps", 0.0)};
    if (up.has("bandwidth_factor"))
      plan.bandwidth = BandwidthFactor{up.real("bandwidth_factor", 0.0)};
    plan.queue_scale_factor = up.real("queue_scale_factor", plan.queue_scale_factor);
    plan.server_capacity_new_rps = up.optional_real("server_capacity_new_rps", std::nullopt);
    plan.validate();
    doc.upgrade = plan;
  }

  const SectionReader crit(root, "criteria");
  auto& c = doc.criteria;
  c.max_total_delay_s = crit.optional_real("max_total_delay_s", c.max_total_delay_s);
  c.min_per_user_throughput_bps =
      crit.optional_real("min_per_user_throughput_bps", c.min_per_user_throughput_bps);
  c.min_fraction_of_max_throughput =
      crit.optional_real("min_fraction_of_max_throughput", c.min_fraction_of_max_throughput);
  c.max_utilization_pct = crit.optional_real("max_utilization_pct", c.max_utilization_pct);
  c.max_drop_rate_pps = crit.optional_real("max_drop_rate_pps", c.max_drop_rate_pps);
  c.validate();

  const SectionReader sw(root, "sweep");
  if (!sw.has("from") || !sw.has("to"))
    throw ValidationError("sweep range is required (sweep.from and sweep.to)", "sweep");
  doc.sweep.from = sw.count("from", 0);
  doc.sweep.to = sw.count("to", 0);
  if (doc.sweep.from > doc.sweep.to) throw ValidationError("from must not exceed to", "sweep");
  return doc;
}

}  // namespace

Override parse_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ValidationError("expected section.key=value, got '" + std::string(assignment) + "'",
                          "--set");
  return {std::string(assignment.substr(0, eq)), std::string(assignment.substr(eq + 1))};
}

ScenarioDocument parse_scenario(std::string_view text, const std::vector<Override>& overrides) {
  json root = parse_json(text);
  if (!overrides.empty() && !root.is_object())
    throw ValidationError("scenario document must be a JSON object");
  for (const auto& o : overrides) apply_override(root, o);
  return from_json(root);
}

std::string serialize_scenario(const ScenarioDocument& doc) {
  using ojson = nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); };

  ojson root;
  const auto& n = doc.network;
  root["network"] = {{"bandwidth_bps", n.bandwidth_bps},
                     {"packet_size_bits", n.packet_size_bits},
                     {"per_user_request_rate_rps", n.per_user_request_rate_rps},
                     {"server_capacity_rps", n.server_capacity_rps},
                     {"server_capacity_users", n.server_capacity_users},
                     {"propagation_speed_mps", n.propagation_speed_mps},
                     {"cable_length_m", n.cable_length_m},
                     {"queue_limit_packets", n.queue_limit_packets}};
  const auto& m = doc.modes;
  root["modes"] = {{"queue_delay_mode", to_string(m.queue_delay_mode)},
                   {"saturation_policy", to_string(m.saturation_policy)},
                   {"processing_mode", to_string(m.processing_mode)},
                   {"throughput_mode", to_string(m.throughput_mode)}};
  if (doc.upgrade) {
    const auto& u = *doc.upgrade;
    ojson up = ojson::object();
    if (const auto* abs = std::get_if<AbsoluteBandwidth>(&u.bandwidth)) up["bandwidth_bps"] = abs->bps;
    if (const auto* f = std::get_if<BandwidthFactor>(&u.bandwidth)) up["bandwidth_factor"] = f->factor;
    up["queue_scale_factor"] = u.queue_scale_factor;
    up["server_capacity_new_rps"] = opt(u.server_capacity_new_rps);
    root["upgrade"] = up;
  }
  const auto& c = doc.criteria;
  root["criteria"] = {{"max_total_delay_s", opt(c.max_total_delay_s)},
                      {"min_per_user_throughput_bps", opt(c.min_per_user_throughput_bps)},
                      {"min_fraction_of_max_throughput", opt(c.min_fraction_of_max_throughput)},
                      {"max_utilization_pct", opt(c.max_utilization_pct)},
                      {"max_drop_rate_pps", opt(c.max_drop_rate_pps)}};
  root["sweep"] = {{"from", doc.sweep.from}, {"to", doc.sweep.to}};
  return root.dump(2) + "\n";
}

}  // namespace capplan::report

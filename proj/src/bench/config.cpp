#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "rab/bench.hpp"

namespace rab::bench {

using nlohmann::json;

const char* to_string(Method m) {
  switch (m) {
    case Method::MinimaxSdp: return "minimax-sdp";
    case Method::MaximinSocpDc: return "maximin-socp-dc";
    case Method::MaximinSdpDc: return "maximin-sdp-dc";
  }
  return "?";
}

const char* to_string(Variant v) { return v == Variant::Ball ? "ball" : "trace"; }

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void only_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (auto allowed : keys) known = known || k == allowed;
    if (!known) fail(path.empty() ? k : path + "." + k, "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> number_or_list(const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    if (out.empty()) fail(path, "empty list");
  } else {
    out.push_back(number(j, path));
  }
  return out;
}

AngularDensity density(const json& j, const std::string& path) {
  const std::string s = text(j, path);
  if (s == "gaussian") return AngularDensity::Gaussian;
  if (s == "uniform") return AngularDensity::Uniform;
  if (s == "point") return AngularDensity::Point;
  fail(path, "unknown density '" + s + "' (gaussian, uniform, point)");
}

// Power is not a key: it follows from snr_db or inr_db.
SourceDescriptor source(const json& j, const std::string& path, SourceDescriptor s) {
  only_keys(j, path, {"density", "center_deg", "spread_deg"});
  if (j.contains("density")) s.density = density(j["density"], join(path, "density"));
  if (j.contains("center_deg")) s.center_deg = number(j["center_deg"], join(path, "center_deg"));
  if (j.contains("spread_deg")) s.spread_deg = number(j["spread_deg"], join(path, "spread_deg"));
  return s;
}

Method method(const json& j, const std::string& path) {
  const std::string s = text(j, path);
  for (Method m : {Method::MinimaxSdp, Method::MaximinSocpDc, Method::MaximinSdpDc})
    if (s == to_string(m)) return m;
  fail(path, "unknown method '" + s + "' (minimax-sdp, maximin-socp-dc, maximin-sdp-dc)");
}

Variant variant(const json& j, const std::string& path) {
  const std::string s = text(j, path);
  if (s == "ball") return Variant::Ball;
  if (s == "trace") return Variant::Trace;
  fail(path, "unknown variant '" + s + "' (ball, trace)");
}

template <class T, class F>
std::vector<T> list(const json& j, const std::string& path, F item) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty list");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const T v = item(j[i], path + "[" + std::to_string(i) + "]");
    for (const T& seen : out)
      if (seen == v) fail(path + "[" + std::to_string(i) + "]", "duplicate entry");
    out.push_back(v);
  }
  return out;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  only_keys(j, "", {"scenario_id", "array", "desired_actual", "desired_presumed", "interferers",
                    "inr_db", "snr_db", "actual_spread_deg", "T", "eta_rule", "gamma_rule",
                    "trace_rule", "pd_floor_rule", "norm", "variants", "runs", "seed", "methods", "signal_rank",
                    "rank_threshold", "grid_step_deg", "dc", "verify_samples"});
  ScenarioConfig c;
  bool variants_given = false;
  if (j.contains("scenario_id")) c.scenario_id = text(j["scenario_id"], "scenario_id");
  if (j.contains("array")) {
    const json& a = j["array"];
    only_keys(a, "array", {"sensors", "spacing"});
    if (a.contains("sensors")) c.array.sensors = static_cast<int>(integer(a["sensors"], "array.sensors"));
    if (a.contains("spacing")) c.array.spacing = number(a["spacing"], "array.spacing");
  }
  if (j.contains("desired_actual"))
    c.desired_actual = source(j["desired_actual"], "desired_actual", c.desired_actual);
  if (j.contains("desired_presumed"))
    c.desired_presumed = source(j["desired_presumed"], "desired_presumed", c.desired_presumed);
  if (j.contains("interferers")) {
    const json& l = j["interferers"];
    if (!l.is_array()) fail("interferers", "expected a list");
    c.interferers.clear();
    for (std::size_t i = 0; i < l.size(); ++i)
      c.interferers.push_back(source(l[i], "interferers[" + std::to_string(i) + "]",
                                     {AngularDensity::Point, 0.0, 0.0, 1.0}));
  }
  if (j.contains("inr_db")) c.inr_db = number(j["inr_db"], "inr_db");
  if (j.contains("snr_db")) c.snr_db = number_or_list(j["snr_db"], "snr_db");
  if (j.contains("actual_spread_deg")) {
    const json& s = j["actual_spread_deg"];
    if (!s.is_array()) fail("actual_spread_deg", "expected a list of spreads");
    c.actual_spread_deg = number_or_list(s, "actual_spread_deg");
  }
  if (j.contains("T")) c.T = static_cast<int>(integer(j["T"], "T"));
  if (j.contains("eta_rule")) c.eta_rule = number(j["eta_rule"], "eta_rule");
  if (j.contains("gamma_rule")) c.gamma_rule = number(j["gamma_rule"], "gamma_rule");
  if (j.contains("trace_rule")) {
    const json& t = j["trace_rule"];
    if (t.is_null()) {
      c.trace_rule.reset();
    } else {
      if (!t.is_array() || t.size() != 2) fail("trace_rule", "expected [lower, upper] or null");
      c.trace_rule = TraceRule{number(t[0], "trace_rule[0]"), number(t[1], "trace_rule[1]")};
    }
  }
  if (j.contains("pd_floor_rule")) c.pd_floor_rule = number(j["pd_floor_rule"], "pd_floor_rule");
  if (j.contains("norm")) {
    const std::string n = text(j["norm"], "norm");
    if (n == "frobenius")
      c.norm = NormKind::Frobenius;
    else if (n == "spectral")
      c.norm = NormKind::Spectral;
    else
      fail("norm", "unknown norm '" + n + "' (frobenius, spectral)");
  }
  if (j.contains("variants")) {
    c.variants = list<Variant>(j["variants"], "variants", variant);
    variants_given = true;
  }
  if (j.contains("runs")) c.runs = static_cast<int>(integer(j["runs"], "runs"));
  if (j.contains("seed")) {
    const long long s = integer(j["seed"], "seed");
    if (s < 0) fail("seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("methods")) c.methods = list<Method>(j["methods"], "methods", method);
  if (j.contains("signal_rank") && !j["signal_rank"].is_null())
    c.signal_rank = static_cast<int>(integer(j["signal_rank"], "signal_rank"));
  if (j.contains("rank_threshold")) c.rank_threshold = number(j["rank_threshold"], "rank_threshold");
  if (j.contains("grid_step_deg")) c.grid_step_deg = number(j["grid_step_deg"], "grid_step_deg");
  if (j.contains("dc")) {
    const json& d = j["dc"];
    only_keys(d, "dc", {"tol", "max_iter"});
    if (d.contains("tol")) c.dc.tol = number(d["tol"], "dc.tol");
    if (d.contains("max_iter")) c.dc.max_iter = static_cast<int>(integer(d["max_iter"], "dc.max_iter"));
  }
  if (j.contains("verify_samples"))
    c.verify_samples = static_cast<int>(integer(j["verify_samples"], "verify_samples"));
  if (!variants_given && !c.trace_rule) c.variants = {Variant::Ball};
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ScenarioConfig& c) {
  if (c.scenario_id.empty() || c.scenario_id.find_first_of(",\"\r\n") != std::string::npos)
    fail("scenario_id", "must be non-empty without commas, quotes or line breaks");
  if (c.array.sensors < 2) fail("array.sensors", "must be >= 2");
  if (!(c.array.spacing > 0.0)) fail("array.spacing", "must be > 0");
  auto check_source = [](const SourceDescriptor& s, const std::string& path) {
    if (s.spread_deg < 0.0) fail(path + ".spread_deg", "must be >= 0");
    if (std::abs(s.center_deg) > 90.0) fail(path + ".center_deg", "must lie in [-90, 90]");
  };
  check_source(c.desired_actual, "desired_actual");
  check_source(c.desired_presumed, "desired_presumed");
  for (std::size_t i = 0; i < c.interferers.size(); ++i)
    check_source(c.interferers[i], "interferers[" + std::to_string(i) + "]");
  for (double s : c.actual_spread_deg)
    if (s < 0.0) fail("actual_spread_deg", "spreads must be >= 0");
  if (c.T < 1) fail("T", "must be >= 1");
  if (c.eta_rule < 0.0 || c.eta_rule >= 1.0) fail("eta_rule", "must lie in [0, 1)");
  if (c.gamma_rule < 0.0) fail("gamma_rule", "must be >= 0");
  if (c.trace_rule && (c.trace_rule->lower < 0.0 || c.trace_rule->lower > c.trace_rule->upper))
    fail("trace_rule", "needs 0 <= lower <= upper");
  if (c.pd_floor_rule < 0.0 || c.pd_floor_rule > 1.0) fail("pd_floor_rule", "must lie in [0, 1]");
  if (c.runs < 1) fail("runs", "must be >= 1");
  if (c.methods.empty()) fail("methods", "at least one method is required");
  if (c.variants.empty()) fail("variants", "at least one variant is required");
  for (Variant v : c.variants)
    if (v == Variant::Trace && !c.trace_rule) fail("variants", "'trace' needs a trace_rule");
  if (c.signal_rank && (*c.signal_rank < 1 || *c.signal_rank > c.array.sensors))
    fail("signal_rank", "must lie in [1, array.sensors]");
  if (!(c.rank_threshold > 0.0 && c.rank_threshold < 1.0)) fail("rank_threshold", "must lie in (0, 1)");
  if (!(c.grid_step_deg > 0.0)) fail("grid_step_deg", "must be > 0");
  if (!(c.dc.tol >= 0.0)) fail("dc.tol", "must be >= 0");
  if (c.dc.max_iter < 1) fail("dc.max_iter", "must be >= 1");
  if (c.verify_samples < 1) fail("verify_samples", "must be >= 1");
  sweep_axis(c);
}

Axis sweep_axis(const ScenarioConfig& c) {
  const bool snr = c.snr_db.size() > 1;
  const bool spread = !c.actual_spread_deg.empty();
  if (snr && spread) fail("snr_db", "two sweep axes (snr_db list and actual_spread_deg); use one");
  return snr ? Axis::Snr : spread ? Axis::Spread : Axis::None;
}

std::vector<AxisPoint> axis_points(const ScenarioConfig& c) {
  std::vector<AxisPoint> pts;
  switch (sweep_axis(c)) {
    case Axis::Snr:
      for (double s : c.snr_db) pts.push_back({s, std::nullopt});
      break;
    case Axis::Spread:
      for (double s : c.actual_spread_deg) pts.push_back({c.snr_db.front(), s});
      break;
    case Axis::None:
      pts.push_back({c.snr_db.front(), std::nullopt});
      break;
  }
  return pts;
}

}  // namespace rab::bench

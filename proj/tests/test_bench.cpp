#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "rab/bench.hpp"
#include "rab/minimax.hpp"

using namespace rab;
using namespace rab::bench;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

// Small and quick: six sensors, ball variant only.
ScenarioConfig small_config() {
  ScenarioConfig c;
  c.scenario_id = "small";
  c.array.sensors = 6;
  c.T = 30;
  c.trace_rule.reset();
  c.variants = {Variant::Ball};
  return c;
}

std::string csv(std::vector<RunRecord> recs, bool drop_wall) {
  if (drop_wall)
    for (auto& r : recs) r.wall_ms = 0.0;
  std::ostringstream os;
  write_csv(os, recs);
  return os.str();
}

}  // namespace

TEST(Config, BaselineFileLoads) {
  const ScenarioConfig c = load_config(std::string(RAB_SOURCE_DIR) + "/configs/baseline.json");
  EXPECT_EQ(c.array.sensors, 10);
  EXPECT_EQ(c.T, 50);
  EXPECT_DOUBLE_EQ(c.eta_rule, 0.5);
  EXPECT_DOUBLE_EQ(c.gamma_rule, 0.1);
  ASSERT_TRUE(c.trace_rule.has_value());
  EXPECT_DOUBLE_EQ(c.trace_rule->lower, 0.5);
  EXPECT_DOUBLE_EQ(c.trace_rule->upper, 0.9);
  EXPECT_EQ(c.methods.size(), 3u);
}

TEST(Config, EveryShippedConfigLoads) {
  for (const char* name : {"baseline.json", "sweep_snr.json", "sweep_rank.json", "singleton.json"})
    EXPECT_NO_THROW(load_config(std::string(RAB_SOURCE_DIR) + "/configs/" + name)) << name;
}

TEST(Config, UnknownKeyNamesTheField) {
  EXPECT_TRUE(starts_with(config_error(R"({"eta_rul": 0.5})"), "eta_rul: unknown key"));
  EXPECT_TRUE(starts_with(config_error(R"({"array": {"sensor": 8}})"), "array.sensor: unknown key"));
  EXPECT_TRUE(starts_with(config_error(R"({"interferers": [{"power": 3}]})"),
                          "interferers[0].power: unknown key"));
}

TEST(Config, UnknownMethodIsRejected) {
  const std::string e = config_error(R"({"methods": ["minimax-sdp", "mvdr"]})");
  EXPECT_TRUE(starts_with(e, "methods[1]:")) << e;
}

TEST(Config, TwoSweepAxesAreRejected) {
  const std::string e = config_error(R"({"snr_db": [0, 10], "actual_spread_deg": [1, 2]})");
  EXPECT_TRUE(starts_with(e, "snr_db:")) << e;
}

TEST(Config, RangeChecks) {
  EXPECT_TRUE(starts_with(config_error(R"({"eta_rule": 1.0})"), "eta_rule:"));
  EXPECT_TRUE(starts_with(config_error(R"({"runs": 0})"), "runs:"));
  EXPECT_TRUE(starts_with(config_error(R"({"trace_rule": [0.9, 0.5]})"), "trace_rule:"));
  EXPECT_TRUE(starts_with(config_error(R"({"trace_rule": null, "variants": ["trace"]})"),
                          "variants:"));
  EXPECT_TRUE(starts_with(config_error(R"({"scenario_id": "a,b"})"), "scenario_id:"));
  EXPECT_TRUE(starts_with(config_error(R"({"T": 2.5})"), "T:"));
  EXPECT_FALSE(config_error("{").empty());
}

TEST(Config, WithoutTraceRuleOnlyTheBallVariantRuns) {
  const ScenarioConfig c = parse_config(R"({"trace_rule": null})");
  ASSERT_EQ(c.variants.size(), 1u);
  EXPECT_EQ(c.variants[0], Variant::Ball);
}

TEST(Csv, HeaderIsFixed) {
  std::ostringstream os;
  write_csv(os, {});
  EXPECT_EQ(os.str(),
            "scenario_id,run_index,snr_db,rank_Rs,method,uncertainty_variant,objective,"
            "output_sinr_db,iterations,wall_ms,status,seed\n");
}

TEST(Csv, NineSignificantDigits) {
  EXPECT_EQ(format_real(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_real(123456.7891), "123456.789");
  EXPECT_EQ(format_real(-10.0), "-10");
}

TEST(Run, SingletonObjectiveMatchesEigenOracle) {
  ScenarioConfig c = small_config();
  c.eta_rule = 0.0;
  c.gamma_rule = 0.0;
  c.methods = {Method::MinimaxSdp};
  const auto recs = run_all(c);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].status, "optimal");
  const RunWorld w = simulate(c, axis_points(c).front(), c.seed);
  const ComplexMatrix S = inv_sqrt_psd(w.R_hat);
  const double oracle = lambda_max(S * w.Q_hat * w.Q_hat.adjoint() * S);
  EXPECT_NEAR(recs[0].objective, oracle, 1e-6 * oracle);
}

TEST(Run, SameSeedGivesIdenticalBytes) {
  ScenarioConfig c = small_config();
  c.runs = 2;
  const std::string a = csv(run_all(c, 1), true);
  EXPECT_EQ(a, csv(run_all(c, 1), true));
  EXPECT_EQ(a, csv(run_all(c, 3), true));
}

TEST(Run, RunSeedIsBaseSeedPlusIndex) {
  ScenarioConfig c = small_config();
  c.runs = 3;
  c.seed = 40;
  c.methods = {Method::MaximinSocpDc};
  const auto recs = run_all(c);
  ASSERT_EQ(recs.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(recs[i].run_index, i);
    EXPECT_EQ(recs[i].seed, 40u + static_cast<unsigned>(i));
  }
}

TEST(Run, EmptyTraceIntervalIsRecordedNotThrown) {
  ScenarioConfig c = small_config();
  c.trace_rule = TraceRule{0.0, 0.01};
  c.pd_floor_rule = 1.0;
  c.variants = {Variant::Trace};
  c.methods = {Method::MinimaxSdp, Method::MaximinSocpDc, Method::MaximinSdpDc};
  const auto recs = run_all(c);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].status, "infeasible");
  EXPECT_EQ(recs[1].status, "not_applicable");
  EXPECT_EQ(recs[2].status, "infeasible");
}

TEST(Sweep, SnrAxisCountsRecords) {
  ScenarioConfig c = small_config();
  c.snr_db = {-10.0, 0.0, 10.0};
  c.runs = 5;
  ASSERT_EQ(sweep_axis(c), Axis::Snr);
  const auto recs = run_all(c, 2);
  std::map<std::string, int> per_method;
  for (const auto& r : recs) ++per_method[r.method];
  ASSERT_EQ(per_method.size(), 3u);
  for (const auto& [m, n] : per_method) EXPECT_EQ(n, 15) << m;
  // ordered by axis point, then run index
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const auto& a = recs[i - 1];
    const auto& b = recs[i];
    EXPECT_TRUE(a.snr_db < b.snr_db || (a.snr_db == b.snr_db && a.run_index <= b.run_index));
  }
}

// Eigenvalue count of the generated covariance (threshold 1e-8 of the largest),
// from an independent numpy rebuild of the angular integral.
TEST(Sweep, NarrowSpreadGivesSmallRank) {
  ScenarioConfig c;
  c.actual_spread_deg = {0.15, 1.0, 30.0};
  c.methods = {Method::MaximinSocpDc};
  c.trace_rule.reset();
  c.variants = {Variant::Ball};
  const auto pts = axis_points(c);
  ASSERT_EQ(sweep_axis(c), Axis::Spread);
  const int expected[] = {3, 4, 10};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const RunWorld w = simulate(c, pts[i], c.seed);
    EXPECT_EQ(w.rank_Rs, expected[i]) << pts[i].actual_spread_deg.value();
    EXPECT_EQ(factorize_signal_covariance(w.Rs).cols(), expected[i]);
  }
  const auto recs = run_all(c);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].rank_Rs, 3);
}

TEST(Sweep, MinimaxMeanObjectiveIsAboveDcMeans) {
  ScenarioConfig c;
  c.snr_db = {0.0, 10.0};
  c.runs = 2;
  c.pd_floor_rule = 0.1;
  const auto recs = run_all(c);
  std::map<std::pair<double, std::string>, std::pair<double, int>> sums;
  for (const auto& r : recs) {
    if (r.status == "not_applicable") continue;
    ASSERT_TRUE(std::isfinite(r.objective)) << r.method << " " << r.status;
    auto& s = sums[{r.snr_db, r.uncertainty_variant + "/" + r.method}];
    s.first += r.objective;
    ++s.second;
  }
  for (double snr : c.snr_db)
    for (const char* v : {"ball/", "trace/"}) {
      const auto mm = sums.find({snr, std::string(v) + "minimax-sdp"});
      ASSERT_NE(mm, sums.end());
      for (const char* dc : {"maximin-socp-dc", "maximin-sdp-dc"}) {
        const auto it = sums.find({snr, std::string(v) + dc});
        if (it == sums.end()) continue;
        EXPECT_GE(mm->second.first / mm->second.second + 1e-6,
                  it->second.first / it->second.second)
            << snr << " " << v << dc;
      }
    }
}

TEST(Verify, TamperedValueFailsTheValueChain) {
  ScenarioConfig c = small_config();
  c.verify_samples = 50;
  c.methods = {Method::MinimaxSdp};
  const auto clean = run_checks(c);
  const auto tampered = run_checks(c, {0.1});
  auto find = [](const std::vector<CheckReport>& v, const std::string& name) {
    return *std::find_if(v.begin(), v.end(), [&](const CheckReport& r) { return r.name == name; });
  };
  EXPECT_TRUE(find(clean, "ball/value_chain").pass);
  const CheckReport r = find(tampered, "ball/value_chain");
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.worst_violation, 0.1, 1e-6);
}

TEST(Verify, SingletonSetsMakeTheRightSideAnEquality) {
  ScenarioConfig c = small_config();
  c.eta_rule = 0.0;
  c.gamma_rule = 0.0;
  c.verify_samples = 100;
  c.methods = {Method::MinimaxSdp};
  const auto reports = run_checks(c);
  for (const auto& r : reports) {
    if (r.name == "ball/saddle_point") {
      EXPECT_TRUE(r.pass) << r.worst_violation;
      EXPECT_LE(r.worst_violation, 1e-9);
    }
  }
}

TEST(Verify, ReportsSerialiseAsJson) {
  CheckReport r;
  r.name = "x";
  r.pass = false;
  r.witnesses = {"w0"};
  std::ostringstream os;
  write_reports(os, {r});
  EXPECT_NE(os.str().find("\"result\": \"fail\""), std::string::npos);
  EXPECT_NE(os.str().find("\"w0\""), std::string::npos);
}

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RAB_BENCH_EXE) + " --log-level off " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string temp_path(const std::string& name) {
  return ::testing::TempDir() + name;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTinyConfig = R"({
  "scenario_id": "tiny", "array": {"sensors": 4}, "T": 20, "trace_rule": null,
  "methods": ["minimax-sdp"], "verify_samples": 20
})";

}  // namespace

TEST(Cli, ConfigErrorExitsWithOne) {
  const std::string cfg = temp_path("bad.json");
  write_file(cfg, R"({"methods": ["mvdr"]})");
  EXPECT_EQ(run_cli("solve --config " + cfg + " --out " + temp_path("bad.csv")), 1);
  EXPECT_EQ(run_cli("solve --config " + temp_path("missing.json") + " --out x.csv"), 1);
}

TEST(Cli, SolveWritesCsvAndSeedOverrides) {
  const std::string cfg = temp_path("tiny.json");
  write_file(cfg, kTinyConfig);
  const std::string out = temp_path("tiny.csv");
  ASSERT_EQ(run_cli("--seed 9 solve --config " + cfg + " --out " + out), 0);
  const std::string text = read_file(out);
  EXPECT_TRUE(starts_with(text, std::string(kCsvHeader) + "\n"));
  EXPECT_NE(text.find(",optimal,9\n"), std::string::npos) << text;
}

TEST(Cli, SolveRejectsASweepAxis) {
  const std::string cfg = temp_path("axis.json");
  write_file(cfg, R"({"array": {"sensors": 4}, "trace_rule": null, "snr_db": [0, 10]})");
  EXPECT_EQ(run_cli("solve --config " + cfg + " --out " + temp_path("axis.csv")), 1);
}

TEST(Cli, VerifyExitCodeFollowsTheChecks) {
  const std::string cfg = temp_path("tiny.json");
  write_file(cfg, kTinyConfig);
  const std::string out = temp_path("report.json");
  EXPECT_EQ(run_cli("verify --config " + cfg + " --out " + out + " --lambda-offset 0.1"), 2);
  EXPECT_NE(read_file(out).find("value_chain"), std::string::npos);
}

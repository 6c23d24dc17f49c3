#pragma once

// Monte Carlo scenarios: configuration, per-run simulation, method dispatch and
// CSV output.  Solvers see only the estimates (R_hat, Q_hat); output SINR is
// evaluated against the generator's true covariances.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rab/maximin_dc.hpp"
#include "rab/signal_model.hpp"
#include "rab/uncertainty.hpp"
#include "rab/verify.hpp"

namespace rab::bench {

/// Bad or inconsistent configuration; the message starts with the field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { MinimaxSdp, MaximinSocpDc, MaximinSdpDc };
enum class Variant { Ball, Trace };

const char* to_string(Method m);
const char* to_string(Variant v);

struct TraceRule {
  double lower = 0.5;  // fractions of tr R_hat
  double upper = 0.9;
};

struct ScenarioConfig {
  std::string scenario_id = "scenario";
  ArrayGeometry array;
  SourceDescriptor desired_actual{AngularDensity::Gaussian, 30.0, 4.0, 1.0};
  SourceDescriptor desired_presumed{AngularDensity::Gaussian, 34.0, 6.0, 1.0};
  std::vector<SourceDescriptor> interferers{{AngularDensity::Uniform, 10.0, 10.0, 1.0}};
  double inr_db = 30.0;
  std::vector<double> snr_db{10.0};
  std::vector<double> actual_spread_deg;  // rank sweep axis when non-empty
  int T = 50;
  double eta_rule = 0.5;    // radius of the signal set, fraction of ||Q_hat||_F
  double gamma_rule = 0.1;  // radius of the covariance set, fraction of ||R_hat||_F
  std::optional<TraceRule> trace_rule = TraceRule{};
  double pd_floor_rule = 0.0;  // covariance floor, fraction of lambda_min(R_hat)
  NormKind norm = NormKind::Frobenius;
  std::vector<Variant> variants{Variant::Ball, Variant::Trace};
  int runs = 1;
  std::uint64_t seed = 1;
  std::vector<Method> methods{Method::MinimaxSdp, Method::MaximinSocpDc, Method::MaximinSdpDc};
  std::optional<int> signal_rank;  // columns of Q_hat; automatic when unset
  double rank_threshold = kDefaultRankThreshold;
  double grid_step_deg = kDefaultGridStepDeg;
  DCSettings dc;
  int verify_samples = 1000;
};

/// Parses and validates.  Unknown keys and bad values throw ConfigError naming the field.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
void validate(const ScenarioConfig& cfg);

enum class Axis { None, Snr, Spread };
Axis sweep_axis(const ScenarioConfig& cfg);

struct RunRecord {
  std::string scenario_id;
  int run_index = 0;
  double snr_db = 0.0;
  int rank_Rs = 0;
  std::string method;
  std::string uncertainty_variant;
  double objective = 0.0;  // lambda* or the squared DC objective
  double output_sinr_db = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  std::string status;
  std::uint64_t seed = 0;
};

/// True and estimated quantities of one run.
struct RunWorld {
  ComplexMatrix Rs;       // actual desired signal covariance
  ComplexMatrix Rin;      // actual interference plus noise
  ComplexMatrix R_hat;    // sample covariance of the snapshots
  ComplexMatrix Q_hat;    // factor of the presumed signal covariance
  int rank_Rs = 0;
};

struct AxisPoint {
  double snr_db;
  std::optional<double> actual_spread_deg;
};

std::vector<AxisPoint> axis_points(const ScenarioConfig& cfg);

RunWorld simulate(const ScenarioConfig& cfg, const AxisPoint& point, std::uint64_t run_seed);

struct RunSets {
  SignalSetSpec signal;
  IncSetSpec inc;
};

/// Sets of a variant built from the estimates and the radius rules.
RunSets build_sets(const ScenarioConfig& cfg, const RunWorld& world, Variant variant);

/// One record per (variant, method) for a single run, in configuration order.
/// Solver failures are recorded in the status column.
std::vector<RunRecord> run_once(const ScenarioConfig& cfg, const AxisPoint& point, int run_index);

/// Records ordered by (axis point, run index, variant, method).  `threads` > 1 runs
/// independent runs concurrently; output order does not depend on it.
std::vector<RunRecord> run_all(const ScenarioConfig& cfg, int threads = 1);

inline constexpr const char* kCsvHeader =
    "scenario_id,run_index,snr_db,rank_Rs,method,uncertainty_variant,objective,output_sinr_db,"
    "iterations,wall_ms,status,seed";

/// %.9g for floating fields.
std::string format_real(double v);
void write_csv(std::ostream& os, const std::vector<RunRecord>& records);

/// Check reports of one solved instance (first axis point, run 0), per variant.
struct VerifyOptions {
  double lambda_offset = 0.0;  // added to lambda* before the checks; for exercising failures
};

std::vector<CheckReport> run_checks(const ScenarioConfig& cfg, const VerifyOptions& opts = {});
void write_reports(std::ostream& os, const std::vector<CheckReport>& reports);

}  // namespace rab::bench

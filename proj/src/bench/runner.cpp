#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "rab/bench.hpp"
#include "rab/errors.hpp"
#include "rab/minimax.hpp"

namespace rab::bench {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

int numerical_rank(const ComplexMatrix& R, double threshold) {
  const RealVector ev = eig_hermitian(R).eigenvalues;
  if (ev.size() == 0 || ev(0) <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) r += ev(i) >= threshold * ev(0) ? 1 : 0;
  return r;
}

double output_sinr_db(const RunWorld& world, const ComplexVector& w) {
  const double s = w.dot(world.Rs * w).real();
  const double n = w.dot(world.Rin * w).real();
  return 10.0 * std::log10(s / n);
}

// Largest trace over the covariance ball; a trace interval up to it constrains nothing.
double ball_trace_bound(const IncSetSpec& inc) {
  const double N = static_cast<double>(inc.center.rows());
  const double widen = inc.norm == NormKind::Frobenius ? std::sqrt(N) : N;
  return inc.center.trace().real() + widen * inc.radius;
}

struct Outcome {
  std::optional<ComplexVector> w;
  double objective = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  std::string status;
};

Outcome from_dc(const DCResult& r) {
  return {r.w, r.objective * r.objective, r.iterations, r.converged ? "converged" : "max_iter"};
}

Outcome solve_method(Method m, Variant v, const RunSets& sets, const DCSettings& dc) {
  switch (m) {
    case Method::MinimaxSdp: {
      const MinimaxSolution s = solve_minimax(sets.signal, sets.inc, dc.solver);
      return {s.w_star, s.lambda_star, s.iterations, "optimal"};
    }
    case Method::MaximinSocpDc:
      if (v == Variant::Trace) return {std::nullopt, std::numeric_limits<double>::quiet_NaN(), 0,
                                       "not_applicable"};
      return from_dc(solve_maximin_ball_dc(sets.signal, sets.inc, std::nullopt, dc));
    case Method::MaximinSdpDc: {
      IncSetSpec inc = sets.inc;
      if (v == Variant::Ball) inc.trace = TraceInterval{0.0, ball_trace_bound(inc)};
      return from_dc(solve_maximin_trace_dc(sets.signal, inc, std::nullopt, dc));
    }
  }
  return {};
}

Outcome guarded(Method m, Variant v, const RunSets& sets, const DCSettings& dc) {
  auto failed = [](const char* status) {
    Outcome o;
    o.status = status;
    return o;
  };
  try {
    return solve_method(m, v, sets, dc);
  } catch (const SolverFailure&) {
    return failed("solver_failure");
  } catch (const InfeasibleSet&) {
    return failed("infeasible");
  } catch (const NotPositiveDefinite&) {
    return failed("not_positive_definite");
  } catch (const InvalidInput&) {
    return failed("invalid_input");
  }
}

}  // namespace

RunWorld simulate(const ScenarioConfig& cfg, const AxisPoint& point, std::uint64_t run_seed) {
  const double p = db_to_linear(point.snr_db);
  SourceDescriptor actual = cfg.desired_actual;
  actual.power = p;
  if (point.actual_spread_deg) actual.spread_deg = *point.actual_spread_deg;
  SourceDescriptor presumed = cfg.desired_presumed;
  presumed.power = p;

  const auto N = static_cast<Eigen::Index>(cfg.array.sensors);
  RunWorld w;
  w.Rs = scattered_covariance(cfg.array, actual, cfg.grid_step_deg);
  ComplexMatrix Ri = ComplexMatrix::Zero(N, N);
  for (SourceDescriptor s : cfg.interferers) {
    s.power = db_to_linear(cfg.inr_db);
    Ri += scattered_covariance(cfg.array, s, cfg.grid_step_deg);
  }
  w.Rin = Ri + ComplexMatrix::Identity(N, N);
  w.R_hat = sample_covariance(generate_snapshots(w.Rs, Ri, 1.0, cfg.T, run_seed));
  const ComplexMatrix Rs_presumed = scattered_covariance(cfg.array, presumed, cfg.grid_step_deg);
  std::optional<Eigen::Index> M;
  if (cfg.signal_rank) M = *cfg.signal_rank;
  w.Q_hat = factorize_signal_covariance(Rs_presumed, M, cfg.rank_threshold);
  w.rank_Rs = numerical_rank(w.Rs, cfg.rank_threshold);
  return w;
}

RunSets build_sets(const ScenarioConfig& cfg, const RunWorld& world, Variant variant) {
  RunSets s;
  s.signal = {world.Q_hat, cfg.norm, cfg.eta_rule * world.Q_hat.norm()};
  s.inc.center = world.R_hat;
  s.inc.norm = cfg.norm;
  s.inc.radius = cfg.gamma_rule * world.R_hat.norm();
  s.inc.pd_floor = cfg.pd_floor_rule * lambda_min(world.R_hat);
  if (variant == Variant::Trace) {
    const double tr = world.R_hat.trace().real();
    s.inc.trace = TraceInterval{cfg.trace_rule->lower * tr, cfg.trace_rule->upper * tr};
  }
  return s;
}

std::vector<RunRecord> run_once(const ScenarioConfig& cfg, const AxisPoint& point, int run_index) {
  const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(run_index);
  const RunWorld world = simulate(cfg, point, run_seed);
  std::vector<RunRecord> out;
  for (Variant v : cfg.variants) {
    const RunSets sets = build_sets(cfg, world, v);
    for (Method m : cfg.methods) {
      const auto t0 = std::chrono::steady_clock::now();
      const Outcome o = guarded(m, v, sets, cfg.dc);
      const auto t1 = std::chrono::steady_clock::now();
      RunRecord r;
      r.scenario_id = cfg.scenario_id;
      r.run_index = run_index;
      r.snr_db = point.snr_db;
      r.rank_Rs = world.rank_Rs;
      r.method = to_string(m);
      r.uncertainty_variant = to_string(v);
      r.objective = o.objective;
      r.output_sinr_db = o.w ? output_sinr_db(world, *o.w) : std::numeric_limits<double>::quiet_NaN();
      r.iterations = o.iterations;
      r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      r.status = o.status;
      r.seed = run_seed;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<RunRecord> run_all(const ScenarioConfig& cfg, int threads) {
  const std::vector<AxisPoint> points = axis_points(cfg);
  const std::size_t jobs = points.size() * static_cast<std::size_t>(cfg.runs);
  std::vector<std::vector<RunRecord>> slots(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs; k = next++)
      slots[k] = run_once(cfg, points[k / cfg.runs], static_cast<int>(k % cfg.runs));
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(jobs)));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<RunRecord> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<CheckReport> run_checks(const ScenarioConfig& cfg, const VerifyOptions& opts) {
  const AxisPoint point = axis_points(cfg).front();
  const RunWorld world = simulate(cfg, point, cfg.seed);
  std::vector<CheckReport> reports;
  auto add = [&](Variant v, CheckReport r) {
    r.name = std::string(to_string(v)) + "/" + r.name;
    reports.push_back(std::move(r));
  };
  for (Variant v : cfg.variants) {
    const RunSets sets = build_sets(cfg, world, v);
    MinimaxSolution sol = solve_minimax(sets.signal, sets.inc, cfg.dc.solver);
    sol.lambda_star += opts.lambda_offset;
    const int n = cfg.verify_samples;
    add(v, check_saddle_point(sol, sets.signal, sets.inc, n, cfg.seed));
    add(v, check_optimality_condition(sol.Q_star, sol.R1_star, sol.w_star, sol.lambda_star,
                                      sets.signal, sets.inc, n, cfg.seed + 1));
    add(v, check_value_chain(sol));
    // at the optimum the top eigenvalue is often repeated; the estimates give a smooth point
    add(v, check_grad_Q(sol.Q_star, sol.R1_star, 1e-5, 20, cfg.seed + 2));
    add(v, check_grad_R1(sol.Q_star, sol.R1_star, 1e-5, 20, cfg.seed + 3));
    for (CheckReport r : {check_grad_Q(world.Q_hat, world.R_hat, 1e-5, 20, cfg.seed + 6),
                          check_grad_R1(world.Q_hat, world.R_hat, 1e-5, 20, cfg.seed + 7)}) {
      r.name += "[estimate]";
      add(v, std::move(r));
    }
    const auto N = world.Q_hat.rows(), M = world.Q_hat.cols();
    add(v, check_convexity(ConvexTarget::F, std::nullopt, 500, cfg.seed + 4, N, M));
    add(v, check_convexity(ConvexTarget::H, sol.w_star, 500, cfg.seed + 5, N, M));
    for (Method m : cfg.methods) {
      if (m == Method::MinimaxSdp) continue;
      const Outcome o = guarded(m, v, sets, cfg.dc);
      if (o.status == "not_applicable") continue;
      CheckReport r;
      if (!o.w) {
        r.name = "value_equivalence";
        r.pass = false;
        r.note = "dc solve failed: " + o.status;
      } else {
        r = check_value_equivalence(sol.lambda_star, std::sqrt(o.objective));
      }
      r.name += std::string("[") + to_string(m) + "]";
      add(v, std::move(r));
    }
  }
  return reports;
}

}  // namespace rab::bench

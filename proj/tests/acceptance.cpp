// End-to-end acceptance run.  Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "rab/bench.hpp"
#include "rab/maximin_dc.hpp"
#include "rab/minimax.hpp"
#include "rab/verify.hpp"
#include "test_util.hpp"

using namespace rab;
using rab::testutil::random_complex;
using rab::testutil::random_pd;
using rab::testutil::random_vector;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Every minimax solve made here is logged for the conic soundness criterion.
struct SolveLog {
  int count = 0;
  int not_optimal = 0;
  double worst_residual = 0.0;
  double worst_gap = 0.0;

  void add(const MinimaxSolution& s) {
    ++count;
    if (s.status != conic::SolveStatus::Optimal) ++not_optimal;
    worst_residual = std::max({worst_residual, s.residuals.primal, s.residuals.dual});
    const double gap = std::abs(s.primal_objective - s.dual_objective) /
                       (1.0 + std::abs(s.primal_objective));
    worst_gap = std::max(worst_gap, gap);
  }
};

SolveLog solve_log;

MinimaxSolution logged_minimax(const SignalSetSpec& sig, const IncSetSpec& inc) {
  MinimaxSolution s = solve_minimax(sig, inc);
  solve_log.add(s);
  return s;
}

double oracle_lambda(const ComplexMatrix& Q, const ComplexMatrix& R) {
  const ComplexMatrix Ri = inv_sqrt_psd(R);
  return lambda_max(Ri * Q * Q.adjoint() * Ri);
}

Outcome singleton_reduction() {
  std::mt19937_64 rng(101);
  double worst = 0.0, slowest = 0.0;
  int n = 0;
  for (Eigen::Index N : {4, 8})
    for (Eigen::Index M : {1, 3})
      for (int k = 0; k < 3; ++k) {
        const ComplexMatrix R = random_pd(N, rng);
        const ComplexMatrix Q = random_complex(N, M, rng);
        const auto t0 = std::chrono::steady_clock::now();
        const MinimaxSolution s = logged_minimax({Q, NormKind::Frobenius, 0.0},
                                                 {R, NormKind::Frobenius, 0.0, {}, 0.0});
        slowest = std::max(slowest, seconds_since(t0));
        worst = std::max(worst, rel(s.lambda_star, oracle_lambda(Q, R)));
        ++n;
      }
  return {worst <= 1e-6 && slowest < 1.0,
          std::to_string(n) + " instances, worst rel err " + fmt("%.2e", worst) + ", slowest " +
              fmt("%.3f", slowest) + " s"};
}

Outcome rank_one_closed_form() {
  std::mt19937_64 rng(202);
  double worst_closed = 0.0, worst_agree = 0.0;
  for (Eigen::Index N : {4, 6, 8})
    for (int k = 0; k < 3; ++k) {
      const ComplexMatrix R = random_pd(N, rng);
      const ComplexMatrix a = random_complex(N, 1, rng);
      const SignalSetSpec sig{a, NormKind::Frobenius, 0.0};
      const IncSetSpec inc{R, NormKind::Frobenius, 0.0, {}, 0.0};
      const double closed = (a.adjoint() * R.ldlt().solve(a))(0, 0).real();
      const MinimaxSolution gen = logged_minimax(sig, inc);
      const MinimaxSolution r1 = solve_rank_one(sig, inc);
      worst_closed = std::max(worst_closed, rel(gen.lambda_star, closed));
      worst_agree = std::max(worst_agree, rel(r1.lambda_star, gen.lambda_star));
    }
  return {worst_closed <= 1e-6 && worst_agree <= 1e-6,
          "closed form rel err " + fmt("%.2e", worst_closed) + ", rank-one vs general " +
              fmt("%.2e", worst_agree)};
}

Outcome norm_equivalence() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const ComplexMatrix R = random_pd(6, rng);
    const ComplexMatrix Q = random_complex(6, 2, rng);
    const double eta = 0.3 * Q.norm(), gamma = 0.2 * R.norm();
    const MinimaxSolution fro = logged_minimax({Q, NormKind::Frobenius, eta},
                                               {R, NormKind::Frobenius, gamma, {}, 0.0});
    const MinimaxSolution spec = logged_minimax({Q, NormKind::Spectral, eta},
                                                {R, NormKind::Spectral, gamma, {}, 0.0});
    worst = std::max(worst, rel(spec.lambda_star, fro.lambda_star));
  }
  return {worst <= 1e-5, "10 instances N=6 M=2, worst rel diff " + fmt("%.3e", worst)};
}

// Five general-rank Frobenius instances shared by criteria 4 to 6.
struct Instance {
  SignalSetSpec sig;
  IncSetSpec inc;
  MinimaxSolution sol;
  double solve_s = 0.0;
};

const std::vector<Instance>& frobenius_instances() {
  static const std::vector<Instance> cache = [] {
    std::mt19937_64 rng(404);
    std::vector<Instance> out;
    for (int k = 0; k < 5; ++k) {
      Instance in;
      const ComplexMatrix R = random_pd(6, rng);
      const ComplexMatrix Q = random_complex(6, 2, rng);
      in.sig = {Q, NormKind::Frobenius, 0.3 * Q.norm()};
      in.inc = {R, NormKind::Frobenius, 0.1 * R.norm(), {}, 0.0};
      const auto t0 = std::chrono::steady_clock::now();
      in.sol = logged_minimax(in.sig, in.inc);
      in.solve_s = seconds_since(t0);
      out.push_back(std::move(in));
    }
    return out;
  }();
  return cache;
}

Outcome saddle_point() {
  Outcome o;
  double worst = 0.0, slowest = 0.0;
  int failed = 0;
  std::uint64_t seed = 40;
  for (const Instance& in : frobenius_instances()) {
    const auto t0 = std::chrono::steady_clock::now();
    const CheckReport r = check_saddle_point(in.sol, in.sig, in.inc, 1000, ++seed, 1e-6);
    slowest = std::max(slowest, in.solve_s + seconds_since(t0));
    worst = std::max(worst, r.worst_violation);
    failed += r.pass ? 0 : 1;
  }
  o.pass = failed == 0 && slowest < 10.0;
  o.detail = std::to_string(failed) + "/5 instances with violations, worst " +
             fmt("%.3e", worst) + ", slowest " + fmt("%.2f", slowest) + " s";
  return o;
}

Outcome optimality_condition() {
  double worst = 0.0;
  int failed = 0;
  std::uint64_t seed = 50;
  for (const Instance& in : frobenius_instances()) {
    const CheckReport r =
        check_optimality_condition(in.sol.Q_star, in.sol.R1_star, in.sol.w_star,
                                   in.sol.lambda_star, in.sig, in.inc, 1000, ++seed, 1e-6);
    worst = std::max(worst, r.worst_violation);
    failed += r.pass ? 0 : 1;
  }
  return {failed == 0, std::to_string(failed) + "/5 instances below -1e-6, worst " +
                           fmt("%.3e", worst)};
}

Outcome gradients() {
  double worst = 0.0;
  int failed = 0, checked = 0, skipped = 0;
  std::uint64_t seed = 60;
  auto take = [&](const CheckReport& r) {
    if (r.skipped) {
      ++skipped;
      return;
    }
    ++checked;
    worst = std::max(worst, r.worst_violation);
    failed += r.pass ? 0 : 1;
  };
  for (const Instance& in : frobenius_instances()) {
    take(check_grad_Q(in.sol.Q_star, in.sol.R1_star, 1e-5, 20, ++seed));
    take(check_grad_R1(in.sol.Q_star, in.sol.R1_star, 1e-5, 20, ++seed));
  }
  // Random points away from any optimum.
  std::mt19937_64 rng(61);
  for (int k = 0; k < 5; ++k) {
    const ComplexMatrix Q = random_complex(6, 3, rng);
    const ComplexMatrix R = random_pd(6, rng);
    take(check_grad_Q(Q, R, 1e-5, 20, ++seed));
    take(check_grad_R1(Q, R, 1e-5, 20, ++seed));
  }
  return {failed == 0 && checked > 0,
          std::to_string(checked) + " checks (" + std::to_string(skipped) +
              " skipped at repeated eigenvalues), worst rel err " + fmt("%.2e", worst)};
}

Outcome principal_identities() {
  std::mt19937_64 rng(707);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ComplexMatrix A = random_complex(6, 3, rng);
    const SvdResult s = svd(A);
    const double l1 = s.sigma(0) * s.sigma(0);
    const ComplexVector u1 = s.U.col(0), v1 = s.V.col(0);
    const double a = (A * v1 * v1.adjoint() * A.adjoint() - l1 * u1 * u1.adjoint()).norm();
    const double b = (A.adjoint() * u1 * u1.adjoint() * A - l1 * v1 * v1.adjoint()).norm();
    worst = std::max(worst, std::max(a, b) / l1);
  }
  return {worst <= 1e-9, "100 matrices 6x3, worst ratio " + fmt("%.2e", worst)};
}

Outcome convexity() {
  std::mt19937_64 rng(808);
  const CheckReport f = check_convexity(ConvexTarget::F, std::nullopt, 500, 81, 6, 3, 1e-9);
  const CheckReport h =
      check_convexity(ConvexTarget::H, random_vector(6, rng), 500, 82, 6, 3, 1e-9);
  return {f.pass && h.pass, "f worst " + fmt("%.2e", f.worst_violation) + ", h worst " +
                                fmt("%.2e", h.worst_violation)};
}

// The sweep shared by criteria 9 to 11.
const std::vector<bench::RunRecord>& sweep_records() {
  static const std::vector<bench::RunRecord> cache = [] {
    bench::ScenarioConfig cfg;
    cfg.scenario_id = "acceptance-sweep";
    cfg.snr_db = {-10.0, 0.0, 10.0, 20.0};
    cfg.runs = 20;
    cfg.pd_floor_rule = 0.1;
    const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return bench::run_all(cfg, threads);
  }();
  return cache;
}

using Key = std::tuple<double, int, std::string>;  // snr, run, variant

std::map<Key, std::map<std::string, const bench::RunRecord*>> by_run() {
  std::map<Key, std::map<std::string, const bench::RunRecord*>> out;
  for (const auto& r : sweep_records()) out[{r.snr_db, r.run_index, r.uncertainty_variant}][r.method] = &r;
  return out;
}

bool solved(const bench::RunRecord& r) {
  return r.status == "optimal" || r.status == "converged" || r.status == "max_iter";
}

Outcome dc_dominance() {
  int pairs = 0, violations = 0, unusable = 0;
  double worst = -1e300;
  for (const auto& [key, methods] : by_run()) {
    const auto mm = methods.find("minimax-sdp");
    for (const char* dc : {"maximin-socp-dc", "maximin-sdp-dc"}) {
      const auto it = methods.find(dc);
      if (it == methods.end() || it->second->status == "not_applicable") continue;
      if (mm == methods.end() || !solved(*mm->second) || !solved(*it->second)) {
        ++unusable;
        continue;
      }
      ++pairs;
      const double excess = it->second->objective - mm->second->objective;
      worst = std::max(worst, excess);
      violations += excess > 1e-6 ? 1 : 0;
    }
  }
  return {violations == 0 && unusable == 0 && pairs > 0,
          std::to_string(pairs) + " (run, DC method) pairs, " + std::to_string(violations) +
              " violations, " + std::to_string(unusable) + " failed solves, max dc^2 - lambda " +
              fmt("%.3e", worst)};
}

Outcome sinr_ordering() {
  std::map<double, std::map<std::string, std::pair<double, int>>> sums;
  for (const auto& r : sweep_records()) {
    if (r.uncertainty_variant != "trace" || !std::isfinite(r.output_sinr_db)) continue;
    auto& s = sums[r.snr_db][r.method];
    s.first += r.output_sinr_db;
    ++s.second;
  }
  bool pass = !sums.empty();
  std::ostringstream os;
  for (const auto& [snr, m] : sums) {
    const auto mm = m.find("minimax-sdp");
    const double mean_mm = mm == m.end() ? NAN : mm->second.first / mm->second.second;
    os << "snr " << snr << ": minimax " << fmt("%.2f", mean_mm);
    for (const auto& [name, s] : m) {
      if (name == "minimax-sdp") continue;
      const double mean = s.first / s.second;
      os << ", " << name << " " << fmt("%.2f", mean);
      if (!(mean_mm >= mean - 0.3)) pass = false;
    }
    os << " dB; ";
  }
  return {pass, os.str()};
}

double median(std::vector<int> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome dc_iterations() {
  std::vector<int> socp, sdp;
  for (const auto& r : sweep_records()) {
    if (r.method == "maximin-socp-dc" && r.status != "not_applicable") socp.push_back(r.iterations);
    if (r.method == "maximin-sdp-dc") sdp.push_back(r.iterations);
  }
  const double ms = median(socp), md = median(sdp);
  return {ms <= 6.0 && md <= 10.0,
          "median socp-dc " + fmt("%.1f", ms) + ", sdp-dc " + fmt("%.1f", md)};
}

Outcome conic_soundness() {
  std::mt19937_64 rng(1212);
  double worst_dual = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Eigen::Index N = 4 + k % 3;
    const ComplexMatrix R = random_pd(N, rng);
    const double tr = R.trace().real();
    const IncSetSpec inc{R, k % 2 ? NormKind::Spectral : NormKind::Frobenius, 0.2 * R.norm(),
                         TraceInterval{0.6 * tr, 0.95 * tr}, 0.0};
    const ComplexVector w = random_vector(N, rng);
    const double primal = worst_case_inc_power(inc, w);
    const double dual = dual_inc_power(inc, w).value;
    worst_dual = std::max(worst_dual, std::abs(primal - dual) / (1.0 + std::abs(primal)));
  }
  int bad_status = 0;
  for (const auto& r : sweep_records())
    if (r.method == "minimax-sdp" && r.status != "optimal") ++bad_status;
  const bool pass = solve_log.not_optimal == 0 && bad_status == 0 &&
                    solve_log.worst_residual <= 1e-7 && solve_log.worst_gap <= 1e-7 &&
                    worst_dual <= 1e-6;
  return {pass, std::to_string(solve_log.count) + " direct solves (" +
                    std::to_string(solve_log.not_optimal) + " not optimal), " +
                    std::to_string(bad_status) + " sweep minimax not optimal, residual " +
                    fmt("%.2e", solve_log.worst_residual) + ", gap " +
                    fmt("%.2e", solve_log.worst_gap) + ", primal-dual power " +
                    fmt("%.2e", worst_dual)};
}

std::string csv_without_wall(const std::vector<bench::RunRecord>& recs) {
  std::vector<bench::RunRecord> copy = recs;
  for (auto& r : copy) r.wall_ms = 0.0;
  std::ostringstream os;
  bench::write_csv(os, copy);
  return os.str();
}

Outcome determinism() {
  bench::ScenarioConfig cfg;
  cfg.scenario_id = "determinism";
  cfg.runs = 2;
  cfg.pd_floor_rule = 0.1;
  const std::string a = csv_without_wall(bench::run_all(cfg, 1));
  const std::string b = csv_without_wall(bench::run_all(cfg, 2));
  return {a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"singleton reduction", singleton_reduction},
      {"rank-one closed form", rank_one_closed_form},
      {"norm equivalence", norm_equivalence},
      {"saddle point", saddle_point},
      {"optimality condition", optimality_condition},
      {"gradient checks", gradients},
      {"principal pair identities", principal_identities},
      {"convexity sampling", convexity},
      {"dc dominance", dc_dominance},
      {"output sinr ordering", sinr_ordering},
      {"dc iteration counts", dc_iterations},
      {"conic core soundness", conic_soundness},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

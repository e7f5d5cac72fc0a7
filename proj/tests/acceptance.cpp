// Acceptance suite: runs every acceptance criterion at its stated
// tolerance against the public C API and prints one pass/fail line per
// criterion. The final criterion re-runs everything at a different thread
// count and demands bit-identical results.
//
// --quick shrinks replicate counts for development; the default run is
// the inspection configuration.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "stirlab/stirlab.h"

namespace {

constexpr std::uint64_t kSeed = 0x5717ab0001ull;

bool g_quick = false;

struct CriterionResult {
  bool pass = false;
  bool hard = true;  // false: diagnostic criterion, does not fail the suite
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string detail;
  std::vector<double> digest_values;
};

std::uint64_t fnv64(const std::vector<double>& values) {
  std::uint64_t h = 14695981039346656037ull;
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

void require_ok(stir_status s, const char* where) {
  if (s != STIR_OK) {
    std::cerr << "fatal: " << where << ": " << stir_status_name(s) << " ("
              << stir_last_error() << ")\n";
    std::exit(1);
  }
}

struct WalkHandle {
  stir_walk* w = nullptr;
  explicit WalkHandle(int d) { require_ok(stir_walk_create(d, &w), "walk"); }
  ~WalkHandle() { stir_walk_free(w); }
};

// ---------------------------------------------------------------------
// Criterion 1: exact Markov identity, n <= 30, d in {3,4,5}, <= 1e-12.

CriterionResult criterion_identity(int /*threads*/) {
  CriterionResult r;
  r.budget_seconds = 10.0;
  double worst = 0.0;
  for (const int d : {3, 4, 5}) {
    WalkHandle walk(d);
    double residual = 0.0;
    require_ok(stir_walk_identity_residual(walk.w, 30, &residual), "identity");
    worst = std::max(worst, residual);
    r.digest_values.push_back(residual);
  }
  r.pass = worst <= 1e-12;
  r.detail = "max residual " + std::to_string(worst);
  return r;
}

// ---------------------------------------------------------------------
// Criterion 2: 6*theta vs G(0,0)-1 within 2e-4; theta in [0.085, 0.087].

CriterionResult criterion_constants(int /*threads*/) {
  CriterionResult r;
  r.budget_seconds = 60.0;
  WalkHandle walk(3);
  stir_series_result res{};
  require_ok(stir_walk_series(walk.w, 2.3e-3, 0, &res), "series");
  const double gap = std::abs(6.0 * res.theta - (res.green - 1.0));
  r.pass = res.converged && gap <= 2e-4 && res.theta >= 0.085 &&
           res.theta <= 0.087;
  r.detail = "theta=" + std::to_string(res.theta) +
             " green=" + std::to_string(res.green) +
             " |6t-(G-1)|=" + std::to_string(gap) +
             " n_used=" + std::to_string(res.n_used);
  r.digest_values = {res.theta, res.green, res.partial_sum, res.tail_bound};
  return r;
}

// ---------------------------------------------------------------------
// Criterion 3: Lemma-level coupling, (d,N) in {3,4}x{2,4}, t=1, 1e5 reps.

CriterionResult criterion_coupling(int threads) {
  CriterionResult r;
  r.budget_seconds = 300.0;
  const std::uint64_t reps = g_quick ? 20000 : 100000;
  bool ok = true;
  for (const int d : {3, 4}) {
    for (const double n : {2.0, 4.0}) {
      stir_estimate v{}, w{};
      require_ok(stir_occupation_mc(d, n, 1.0, reps,
                                    stir_mix_seed(kSeed, 30 + d), threads, 'v',
                                    &v),
                 "occupation v");
      require_ok(stir_occupation_mc(d, n, 1.0, reps,
                                    stir_mix_seed(kSeed, 40 + d), threads, 'w',
                                    &w),
                 "occupation w");
      const double pooled = std::sqrt(v.sem * v.sem + w.sem * w.sem);
      const double z = std::abs(v.mean - w.mean) / pooled;
      ok = ok && z <= 3.0;
      r.detail += "(d=" + std::to_string(d) + ",N=" + std::to_string((int)n) +
                  ": " + std::to_string(z) + " sigma) ";
      r.digest_values.insert(r.digest_values.end(),
                             {v.mean, v.sem, w.mean, w.sem});
    }
  }
  r.pass = ok;
  return r;
}

// ---------------------------------------------------------------------
// Criterion 4: P(F1) Monte Carlo within 3 sigma of the closed form.

CriterionResult criterion_f1(int threads) {
  CriterionResult r;
  r.budget_seconds = 120.0;
  const std::uint64_t reps = g_quick ? 20000 : 100000;
  bool ok = true;
  int idx = 0;
  for (const double n : {4.0, 10.0, 40.0}) {
    for (const double theta : {0.0, 0.05}) {
      stir_lineage_result mc{};
      require_ok(stir_lineage_mc(3, n, theta, reps,
                                 stir_mix_seed(kSeed, 50 + idx), threads, &mc),
                 "lineage");
      double expect = 0.0;
      require_ok(stir_f1_analytic(n, theta, &expect), "f1 analytic");
      const double z = std::abs(mc.f1_mean - expect) / mc.f1_sem;
      ok = ok && z <= 3.0;
      r.detail += "(N=" + std::to_string((int)n) + ",th=" +
                  std::to_string(theta) + ": " + std::to_string(z) +
                  " sigma) ";
      r.digest_values.insert(r.digest_values.end(), {mc.f1_mean, mc.f1_sem});
      ++idx;
    }
  }
  r.pass = ok;
  return r;
}

// ---------------------------------------------------------------------
// Criterion 5: N E[Z1] matches the analytic value at each N and the gap to
// 3 theta strictly shrinks over N in {8, 32, 128}.

CriterionResult criterion_z1_trend(int threads) {
  CriterionResult r;
  r.budget_seconds = 1200.0;
  const std::uint64_t reps = g_quick ? 100000 : 1000000;
  WalkHandle walk(3);
  stir_series_result series{};
  require_ok(stir_walk_series(walk.w, 2.3e-3, 0, &series), "series");
  const double three_theta = 3.0 * series.theta;

  bool ok = true;
  double prev_gap = 1e9;
  int idx = 0;
  for (const double n : {8.0, 32.0, 128.0}) {
    stir_lineage_result mc{};
    require_ok(stir_lineage_mc(3, n, 0.0, reps, stir_mix_seed(kSeed, 60 + idx),
                               threads, &mc),
               "lineage");
    double analytic = 0.0;
    require_ok(stir_z1_analytic(walk.w, n, 0.0, 0, &analytic), "z1 analytic");
    const double z = std::abs(mc.z1_mean - analytic) / mc.z1_sem;
    const double gap = std::abs(n * mc.z1_mean - three_theta);
    ok = ok && z <= 3.0 && gap < prev_gap;
    r.detail += "(N=" + std::to_string((int)n) + ": " + std::to_string(z) +
                " sigma, gap " + std::to_string(gap) + ") ";
    r.digest_values.insert(r.digest_values.end(),
                           {mc.z1_mean, mc.z1_sem, analytic, gap});
    prev_gap = gap;
    ++idx;
  }
  r.detail += "3theta=" + std::to_string(three_theta);
  r.pass = ok;
  return r;
}

// ---------------------------------------------------------------------
// Criterion 6: survival moves monotonically toward 1/2 over N in
// {5, 10, 20} at lambda = 2 and lands within 0.1 at N = 20.

CriterionResult criterion_survival_limit(int threads) {
  CriterionResult r;
  r.budget_seconds = 1800.0;
  const std::uint64_t reps = g_quick ? 300 : 1000;
  const stir_stop_policy policy{200.0, 1000, nullptr, 0, 0};
  bool ok = true;
  double prev_dist = 1.0;
  int idx = 0;
  for (const double n : {5.0, 10.0, 20.0}) {
    const stir_model_params model{3, n, 2.0, 0};
    stir_survival_estimate est{};
    require_ok(stir_survival(&model, &policy, reps,
                             stir_mix_seed(kSeed, 70 + idx), threads, &est),
               "survival");
    const double dist = std::abs(est.rho_hat - 0.5);
    ok = ok && dist <= prev_dist;
    if (n == 20.0) ok = ok && dist <= 0.1;
    r.detail += "(N=" + std::to_string((int)n) + ": rho=" +
                std::to_string(est.rho_hat) + ") ";
    r.digest_values.push_back(est.rho_hat);
    prev_dist = dist;
    ++idx;
  }
  r.pass = ok;
  return r;
}

// ---------------------------------------------------------------------
// Criterion 7: lambda = 0.8, N = 10 never reaches the proxy cap.

CriterionResult criterion_subcritical(int threads) {
  CriterionResult r;
  r.budget_seconds = 300.0;
  const std::uint64_t reps = g_quick ? 2000 : 10000;
  const stir_model_params model{3, 10.0, 0.8, 0};
  const stir_stop_policy policy{200.0, 1000, nullptr, 0, 0};
  stir_survival_estimate est{};
  require_ok(stir_survival(&model, &policy, reps, stir_mix_seed(kSeed, 80),
                           threads, &est),
             "survival");
  r.pass = est.successes == 0;
  r.detail = std::to_string(est.successes) + "/" + std::to_string(est.reps) +
             " proxy hits";
  r.digest_values = {static_cast<double>(est.successes)};
  return r;
}

// ---------------------------------------------------------------------
// Criterion 8: mean mass strictly decreasing at 2 sigma across speeded-up
// checkpoints {5, 10, 20} for theta = 0.04 < theta_c at N = 30.

CriterionResult criterion_mass_decay(int threads) {
  CriterionResult r;
  r.budget_seconds = 1800.0;
  const std::uint64_t reps = g_quick ? 10000 : 50000;
  const double checkpoints[3] = {5.0, 10.0, 20.0};
  const stir_model_params model{3, 30.0, 1.0 + 0.04 / 30.0, 1};
  const stir_stop_policy policy{20.0, 1u << 20, checkpoints, 3, 0};
  double mass[3], mass_se[3], drop[3], drop_se[3];
  require_ok(stir_mass_curve(&model, &policy, reps, stir_mix_seed(kSeed, 90),
                             threads, mass, mass_se, nullptr, nullptr, drop,
                             drop_se),
             "mass curve");
  // Paired per-trajectory drops: strict decrease at 2 sigma between
  // consecutive checkpoints.
  bool ok = true;
  for (int i = 1; i < 3; ++i) {
    const double z = drop[i] / drop_se[i];
    ok = ok && z > 2.0;
    r.detail += "(m(" + std::to_string((int)checkpoints[i - 1]) + ")-m(" +
                std::to_string((int)checkpoints[i]) + ")=" +
                std::to_string(drop[i]) + " @" + std::to_string(z) +
                " sigma) ";
  }
  for (int i = 0; i < 3; ++i) {
    r.digest_values.push_back(mass[i]);
    r.digest_values.push_back(drop[i]);
    r.detail += "m(" + std::to_string((int)checkpoints[i]) + ")=" +
                std::to_string(mass[i]) + " ";
  }
  r.pass = ok;
  return r;
}

// ---------------------------------------------------------------------
// Criterion 9 (diagnostic): critical-scan bracket at d=3, N=10 against the
// widened bracketing band; an out-of-band value flags investigation
// rather than failing the suite.

CriterionResult criterion_critical_bracket(int threads) {
  CriterionResult r;
  r.budget_seconds = 7200.0;
  r.hard = false;
  WalkHandle walk(3);
  stir_series_result series{};
  require_ok(stir_walk_series(walk.w, 2.3e-3, 0, &series), "series");

  stir_scan_settings settings{};
  settings.threshold = 0.05;  // module default
  settings.reps_initial = 1000;
  settings.reps_cap = g_quick ? 4000 : 100000;
  settings.tol_lambda = 0.0;  // theta/(4N) default
  settings.theta_ref = series.theta;
  const stir_stop_policy policy{200.0, 1000, nullptr, 0, 0};

  stir_scan* scan = nullptr;
  require_ok(stir_scan_run(3, 10.0, &settings, &policy,
                           stir_mix_seed(kSeed, 95), threads, &scan),
             "scan");
  double lo = 0.0, hat = 0.0, hi = 0.0;
  stir_scan_bracket(scan, &lo, &hat, &hi);
  const double gap = 10.0 * (hat - 1.0);
  const double band_lo = 1.0 / 30.0 - 0.02;
  const double band_hi = 0.0861 + 0.05;
  const bool in_band = gap >= band_lo && gap <= band_hi;
  const bool inconclusive = stir_scan_inconclusive(scan) != 0;
  r.pass = in_band && !inconclusive;
  r.detail = "N(lambda_hat-1)=" + std::to_string(gap) + " vs band [" +
             std::to_string(band_lo) + ", " + std::to_string(band_hi) +
             "], bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
             "]" + (inconclusive ? " inconclusive" : "") + ", flags='" +
             stir_scan_flags(scan) + "'";
  r.digest_values = {lo, hat, hi, gap};
  stir_scan_free(scan);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--quick") g_quick = true;

  using Criterion = std::function<CriterionResult(int)>;
  const std::vector<std::pair<std::string, Criterion>> criteria = {
      {"markov identity residual <= 1e-12", criterion_identity},
      {"theta/G consistency and window", criterion_constants},
      {"V/W occupation coupling within 3 sigma", criterion_coupling},
      {"P(F1) closed form within 3 sigma", criterion_f1},
      {"N E[Z1] trend toward 3 theta", criterion_z1_trend},
      {"survival toward (lambda-1)/lambda", criterion_survival_limit},
      {"subcritical extinction, zero proxy hits", criterion_subcritical},
      {"mass decay direction at 2 sigma", criterion_mass_decay},
      {"critical bracket diagnostic", criterion_critical_bracket},
  };

  bool all_hard_pass = true;
  std::vector<std::uint64_t> digests;
  std::vector<double> first_pass_seconds;

  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r = criteria[i].second(0);  // default thread count
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool in_budget = g_quick || r.seconds < r.budget_seconds;
    const bool pass = r.pass && in_budget;
    digests.push_back(fnv64(r.digest_values));
    first_pass_seconds.push_back(r.seconds);
    if (r.hard && !pass) all_hard_pass = false;

    std::cout << (pass ? "[PASS]" : (r.hard ? "[FAIL]" : "[DIAG-FAIL]"))
              << " criterion " << (i + 1) << ": " << criteria[i].first << " ("
              << r.seconds << " s" << (in_budget ? "" : ", OVER BUDGET")
              << ") " << r.detail << "\n";
    if (!r.hard && !pass)
      std::cout << "       diagnostic criterion: failure requires "
                   "investigation, not rejection\n";
    std::cout.flush();
  }

  // Criterion 10: every criterion re-runs bit-exactly under a different
  // thread count (1 for the cheap ones, 3 for the heavy ones; the first
  // pass used the hardware default).
  {
    const auto start = std::chrono::steady_clock::now();
    bool deterministic = true;
    std::string detail;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
      const int rerun_threads = first_pass_seconds[i] < 60.0 ? 1 : 3;
      const CriterionResult again = criteria[i].second(rerun_threads);
      if (fnv64(again.digest_values) != digests[i]) {
        deterministic = false;
        detail += "criterion " + std::to_string(i + 1) + " diverged; ";
      }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (!deterministic) all_hard_pass = false;
    std::cout << (deterministic ? "[PASS]" : "[FAIL]")
              << " criterion 10: bit-exact reruns across thread counts ("
              << secs << " s) " << detail << "\n";
  }

  std::cout << (all_hard_pass ? "ACCEPTANCE: PASS" : "ACCEPTANCE: FAIL")
            << "\n";
  return all_hard_pass ? 0 : 1;
}

#include "estimators.hpp"

#include <cmath>

#include "parallel.hpp"
#include "rng.hpp"

namespace stirlab {

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                               double z) {
  if (trials == 0) throw std::domain_error("wilson interval needs trials >= 1");
  if (successes > trials)
    throw std::invalid_argument("successes cannot exceed trials");
  if (z <= 0.0) throw std::invalid_argument("z must be positive");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval w{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == 0) w.low = 0.0;  // algebraically exact endpoints
  if (successes == trials) w.high = 1.0;
  return w;
}

namespace {

constexpr double kZ95 = 1.959963984540054;  // two-sided 95%

struct SurvivalAccumulator {
  std::uint64_t hits = 0;
  void merge(const SurvivalAccumulator& o) { hits += o.hits; }
};

// Counts mass-cap hits over replicates [rep_lo, rep_lo + reps).
std::uint64_t count_survivals(const ModelParams& p, const StopPolicy& stop,
                              std::uint64_t reps, std::uint64_t rep_lo,
                              std::uint64_t seed, int threads) {
  auto acc = run_replicates<SurvivalAccumulator>(
      reps, threads, [&](std::uint64_t r, SurvivalAccumulator& out) {
        const TrajectorySummary t =
            run_trajectory(p, stop, mix_seed(seed, rep_lo + r));
        if (t.outcome == Outcome::mass_cap) ++out.hits;
      });
  return acc.hits;
}

}  // namespace

SurvivalEstimate survival_probability(const ModelParams& p,
                                      const StopPolicy& stop,
                                      std::uint64_t reps, std::uint64_t seed,
                                      int threads) {
  if (reps < 30) throw std::invalid_argument("survival needs reps >= 30");
  p.validate();
  stop.validate();
  SurvivalEstimate out;
  out.params = p;
  out.reps = reps;
  out.successes = count_survivals(p, stop, reps, 0, seed, threads);
  out.rho_hat = static_cast<double>(out.successes) / static_cast<double>(reps);
  const WilsonInterval ci = wilson_interval(out.successes, reps, kZ95);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  return out;
}

namespace {

// Evaluate one lambda level with sequential doubling until the Wilson CI
// excludes the threshold or the replicate budget is exhausted.
ScanLevel evaluate_level(const ModelParams& base, double lambda,
                         const StopPolicy& stop, double threshold,
                         std::uint64_t reps_initial, std::uint64_t reps_cap,
                         std::uint64_t level_seed, int threads) {
  ModelParams p = base;
  p.lambda = lambda;
  ScanLevel level;
  level.lambda = lambda;
  std::uint64_t target = std::min(reps_initial, reps_cap);
  for (;;) {
    const std::uint64_t add = target - level.reps;
    level.successes +=
        count_survivals(p, stop, add, level.reps, level_seed, threads);
    level.reps = target;
    const WilsonInterval ci = wilson_interval(level.successes, level.reps, kZ95);
    level.rho_hat =
        static_cast<double>(level.successes) / static_cast<double>(level.reps);
    level.ci_low = ci.low;
    level.ci_high = ci.high;
    if (ci.low > threshold) {
      level.verdict = 1;
      return level;
    }
    if (ci.high < threshold) {
      level.verdict = -1;
      return level;
    }
    if (target >= reps_cap) {
      level.verdict = 0;
      return level;
    }
    target = std::min(target * 2, reps_cap);
  }
}

}  // namespace

CriticalScanResult critical_scan(int d, double stirring,
                                 const ScanSettings& settings,
                                 const StopPolicy& stop, std::uint64_t seed,
                                 int threads) {
  check_dimension(d);
  if (settings.threshold <= 0.0 || settings.threshold >= 0.5)
    throw std::invalid_argument("scan threshold must be in (0, 0.5)");
  if (settings.theta_ref <= 0.0)
    throw std::invalid_argument("scan needs a positive theta reference");
  stop.validate();

  CriticalScanResult out;
  out.d = d;
  out.stirring = stirring;
  out.threshold = settings.threshold;
  const double tol_lambda = settings.tol_lambda > 0.0
                                ? settings.tol_lambda
                                : settings.theta_ref / (4.0 * stirring);

  ModelParams base;
  base.d = d;
  base.stirring = stirring;
  base.speeded_up = false;

  std::uint64_t level_counter = 0;
  auto run_level = [&](double lambda) {
    ScanLevel level = evaluate_level(
        base, lambda, stop, settings.threshold, settings.reps_initial,
        settings.reps_cap, mix_seed(seed, level_counter++), threads);
    out.levels.push_back(level);
    return level.verdict;
  };

  // Initial bracket [1, 1 + 4 theta / N], widened geometrically until the
  // upper end classifies supercritical.
  double lo = 1.0;
  double hi = 1.0 + 4.0 * settings.theta_ref / stirring;
  int lo_verdict = run_level(lo);
  if (lo_verdict > 0) {
    out.flags.push_back("lower_endpoint_supercritical");
    out.inconclusive = true;
  }
  int hi_verdict = run_level(hi);
  int widenings = 0;
  while (hi_verdict <= 0 && widenings < settings.max_widenings) {
    if (hi_verdict == 0) {
      out.flags.push_back("inconclusive_level");
      out.inconclusive = true;
      break;
    }
    lo = hi;  // subcritical upper end becomes the new lower end
    hi = 1.0 + 2.0 * (hi - 1.0);
    hi_verdict = run_level(hi);
    ++widenings;
  }
  if (hi_verdict < 0) {
    out.flags.push_back("bracket_never_straddled");
    out.inconclusive = true;
  }

  if (!out.inconclusive) {
    while (hi - lo > tol_lambda) {
      const double mid = 0.5 * (lo + hi);
      const int verdict = run_level(mid);
      if (verdict == 0) {
        out.flags.push_back("inconclusive_level");
        out.inconclusive = true;
        break;
      }
      if (verdict > 0)
        hi = mid;
      else
        lo = mid;
    }
  }

  out.lambda_lo = lo;
  out.lambda_hi = hi;
  out.lambda_hat = 0.5 * (lo + hi);

  // Diagnostic: empirical survival should be nondecreasing in lambda up to
  // 2 sigma noise.
  for (std::size_t i = 0; i < out.levels.size(); ++i) {
    for (std::size_t j = 0; j < out.levels.size(); ++j) {
      const ScanLevel& a = out.levels[i];
      const ScanLevel& b = out.levels[j];
      if (a.lambda < b.lambda) {
        const double se = std::sqrt(
            a.rho_hat * (1.0 - a.rho_hat) / static_cast<double>(a.reps) +
            b.rho_hat * (1.0 - b.rho_hat) / static_cast<double>(b.reps));
        if (a.rho_hat > b.rho_hat + 2.0 * se) {
          out.flags.push_back("monotonicity_violation");
          goto done;
        }
      }
    }
  }
done:
  return out;
}

std::vector<ReportRow> asymptotics_report(int d,
                                          const std::vector<double>& n_list,
                                          const ScanSettings& settings,
                                          const StopPolicy& stop,
                                          double theta, double green,
                                          std::uint64_t seed, int threads) {
  check_dimension(d);
  std::vector<ReportRow> rows;
  std::uint64_t stream = 0;
  for (double n : n_list) {
    ScanSettings s = settings;
    if (s.theta_ref <= 0.0) s.theta_ref = theta;
    const CriticalScanResult scan =
        critical_scan(d, n, s, stop, mix_seed(seed, stream++), threads);
    ReportRow row;
    row.stirring = n;
    row.lambda_lo = scan.lambda_lo;
    row.lambda_hat = scan.lambda_hat;
    row.lambda_hi = scan.lambda_hi;
    row.n_times_gap = n * (scan.lambda_hat - 1.0);
    row.theta = theta;
    row.green_bound = (green - 1.0) / (2.0 * d);
    row.konno_lower = 1.0 / (2.0 * d * (2.0 * d - 1.0));
    std::string flags;
    for (const std::string& f : scan.flags) {
      if (!flags.empty()) flags += ';';
      flags += f;
    }
    if (scan.inconclusive) {
      if (!flags.empty()) flags += ';';
      flags += "inconclusive";
    }
    if (row.n_times_gap < 0.5 * theta || row.n_times_gap > 2.0 * theta) {
      if (!flags.empty()) flags += ';';
      flags += "outlier";
    }
    row.flags = flags;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace stirlab

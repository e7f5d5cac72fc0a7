#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simulator.hpp"

namespace stirlab {

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval at the given normal quantile z.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                               double z);

struct SurvivalEstimate {
  ModelParams params;
  std::uint64_t reps = 0;
  std::uint64_t successes = 0;  // survival-proxy hits (mass cap reached)
  double rho_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
};

// Survival proxy: the trajectory reaches the mass cap before extinction or
// the horizon. Wilson 95% bounds.
SurvivalEstimate survival_probability(const ModelParams& p,
                                      const StopPolicy& stop,
                                      std::uint64_t reps, std::uint64_t seed,
                                      int threads);

struct ScanLevel {
  double lambda = 0.0;
  std::uint64_t reps = 0;
  std::uint64_t successes = 0;
  double rho_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  int verdict = 0;  // +1 supercritical, -1 subcritical, 0 inconclusive
};

struct CriticalScanResult {
  int d = 0;
  double stirring = 0.0;
  double threshold = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double lambda_hat = 0.0;
  bool inconclusive = false;
  std::vector<ScanLevel> levels;
  std::vector<std::string> flags;
};

struct ScanSettings {
  double threshold = 0.05;
  std::uint64_t reps_initial = 1000;
  std::uint64_t reps_cap = 100000;  // per level
  double tol_lambda = 0.0;          // <= 0: theta_ref / (4N)
  double theta_ref = 0.0;           // <= 0: caller must supply
  int max_widenings = 12;
};

// Bisection on lambda for the survival-proxy threshold crossing. Each
// level doubles its replicate count until the Wilson CI excludes the
// threshold or the per-level budget runs out (then the scan stops and is
// flagged inconclusive).
CriticalScanResult critical_scan(int d, double stirring,
                                 const ScanSettings& settings,
                                 const StopPolicy& stop, std::uint64_t seed,
                                 int threads);

struct ReportRow {
  double stirring = 0.0;
  double lambda_lo = 0.0;
  double lambda_hat = 0.0;
  double lambda_hi = 0.0;
  double n_times_gap = 0.0;  // N (lambda_hat - 1)
  double theta = 0.0;
  double green_bound = 0.0;  // (G(0,0) - 1) / 2d
  double konno_lower = 0.0;  // 1 / (2d (2d-1))
  std::string flags;
};

// One critical scan per N, annotated with the reference constants; rows
// with N(lambda_hat - 1) outside [theta/2, 2 theta] are flagged as
// diagnostic outliers.
std::vector<ReportRow> asymptotics_report(int d,
                                          const std::vector<double>& n_list,
                                          const ScanSettings& settings,
                                          const StopPolicy& stop,
                                          double theta, double green,
                                          std::uint64_t seed, int threads);

}  // namespace stirlab

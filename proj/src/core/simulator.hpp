#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lattice.hpp"

namespace stirlab {

// Contact process with stirring. In raw time particles die at rate 1,
// give birth at rate lambda onto a uniform neighbor (suppressed onto
// occupied sites), and attempt a stirring jump at rate 2dN; speeded-up
// mode multiplies every rate by N and reports time t = t_raw / N.
struct ModelParams {
  int d = 3;
  double stirring = 1.0;  // N
  double lambda = 1.0;
  bool speeded_up = false;

  double theta() const { return stirring * (lambda - 1.0); }
  void validate() const {
    check_dimension(d);
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    if (stirring < 1.0) throw std::invalid_argument("stirring needs N >= 1");
  }
};

struct StopPolicy {
  double horizon = 200.0;
  std::uint64_t mass_cap = 1000;
  std::vector<double> checkpoints;  // sorted, within [0, horizon]
  std::uint64_t event_budget = 1000000000ull;

  void validate() const {
    if (horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
    if (mass_cap < 1) throw std::invalid_argument("mass_cap must be >= 1");
    double prev = 0.0;
    for (double c : checkpoints) {
      if (c < prev || c > horizon)
        throw std::invalid_argument(
            "checkpoints must be sorted and within [0, horizon]");
      prev = c;
    }
  }
};

enum class Outcome { extinct = 0, mass_cap = 1, horizon = 2, truncated = 3 };

struct TrajectorySummary {
  Outcome outcome = Outcome::horizon;
  double outcome_time = 0.0;
  std::uint64_t event_count = 0;
  std::vector<std::uint64_t> mass_samples;   // |xi_t| at checkpoints
  std::vector<std::int64_t> pair_samples;    // ordered neighbor pairs I_t
};

// Exact-event kinetic Monte Carlo from delta_0 (or an explicit initial
// set). Checkpoint samples are right-continuous in time.
TrajectorySummary run_trajectory(const ModelParams& p, const StopPolicy& stop,
                                 std::uint64_t seed);
TrajectorySummary run_trajectory(const ModelParams& p, const StopPolicy& stop,
                                 std::uint64_t seed,
                                 std::span<const Point> initial);

struct MassCurvePoint {
  double t = 0.0;
  double mass_mean = 0.0, mass_sem = 0.0;
  double pairs_mean = 0.0, pairs_sem = 0.0;
  // Paired per-trajectory statistics of mass(t_prev) - mass(t); sem of the
  // paired difference is what a monotone-decay check should use.
  double drop_mean = 0.0, drop_sem = 0.0;
};

// Pooled means over replicates; extinct trajectories keep contributing
// zeros, so there is no survivorship bias.
std::vector<MassCurvePoint> mass_curve(const ModelParams& p,
                                       const StopPolicy& stop,
                                       std::uint64_t reps, std::uint64_t seed,
                                       int threads);

// Extinction-time sample (capped at the horizon) for distribution-level
// checks; entry i is the outcome time of replicate i.
std::vector<double> extinction_time_sample(const ModelParams& p,
                                           const StopPolicy& stop,
                                           std::uint64_t reps,
                                           std::uint64_t seed, int threads);

}  // namespace stirlab

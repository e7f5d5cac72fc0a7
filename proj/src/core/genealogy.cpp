#include "genealogy.hpp"

#include <cmath>

#include "parallel.hpp"

namespace stirlab {

LineageTrialOutcome simulate_lineage_trial(const LineageParams& p, Rng& rng) {
  p.validate();
  const double n = p.stirring;
  const double tau = p.tau();
  LineageTrialOutcome out;

  // Parent clocks. Position is irrelevant before the split.
  const double t_split = rng.exponential(n + p.theta);
  const double t_death = rng.exponential(n);
  if (t_death < t_split || t_split >= tau) return out;  // no clean split
  out.has_split = true;
  out.split_time = t_split;
  const double remaining = tau - t_split;

  // Each child must stay event-free (no death, no second split) until tau.
  const double child_event_rate = 2.0 * n + p.theta;
  const bool child_a_quiet = rng.exponential(child_event_rate) >= remaining;
  const bool child_b_quiet = rng.exponential(child_event_rate) >= remaining;
  out.f1 = child_a_quiet && child_b_quiet;
  if (!out.f1) return out;

  // Children difference: one child sits on the parent site, the other on a
  // uniform neighbor, so the difference starts uniform on dd and then runs
  // as the W chain for the residual window.
  Point w = step(origin(), static_cast<int>(rng.below(
                               static_cast<std::uint32_t>(2 * p.d))));
  double now = 0.0;
  for (;;) {
    const double dt = rng.exponential(w_chain_rate(w, p.d, n));
    if (now + dt >= remaining) break;
    now += dt;
    w = w_chain_jump(w, p.d, rng);
  }
  out.z1 = in_neighborhood(w, p.d);
  return out;
}

double f1_analytic(const LineageParams& p) {
  p.validate();
  const double n = p.stirring;
  const double tau = p.tau();
  const double rate = 2.0 * n + p.theta;
  const double decay = std::exp(-rate * tau);
  return (n + p.theta) / rate * decay * (1.0 - decay);
}

double z1_analytic(WalkAnalytics& walk, const LineageParams& p,
                   Z1Exponent variant, double quad_rel_tol) {
  p.validate();
  if (walk.dim() != p.d)
    throw std::invalid_argument("walk cache dimension mismatch");
  const double n = p.stirring;
  const double tau = p.tau();
  const double rate = 2.0 * n + p.theta;
  const double first = variant == Z1Exponent::f1_consistent
                           ? std::exp(-rate * tau)
                           : std::exp(-2.0 * (n + p.theta) * tau);
  const double split_factor =
      (n + p.theta) / rate * first * (1.0 - std::exp(-rate * tau));
  const double upper = 4.0 * p.d * n * n * tau;  // = 4 d ln N
  const double h_avg = walk.h_integral(upper, quad_rel_tol) / upper;
  return split_factor * h_avg;
}

namespace {

struct LineageAccumulator {
  CountAccumulator f1;
  CountAccumulator z1;
  void merge(const LineageAccumulator& o) {
    f1.merge(o.f1);
    z1.merge(o.z1);
  }
};

}  // namespace

LineageEstimate estimate_z1(const LineageParams& p, std::uint64_t reps,
                            std::uint64_t seed, int threads) {
  p.validate();
  if (reps < 1000)
    throw std::invalid_argument("lineage estimation needs reps >= 1000");
  auto r = run_replicates<LineageAccumulator>(
      reps, threads, [&](std::uint64_t i, LineageAccumulator& acc) {
        Rng rng(mix_seed(seed, i));
        const LineageTrialOutcome t = simulate_lineage_trial(p, rng);
        acc.f1.add(t.f1);
        acc.z1.add(t.z1);
      });
  LineageEstimate out;
  out.f1_mean = r.f1.mean();
  out.f1_sem = r.f1.sem();
  out.z1_mean = r.z1.mean();
  out.z1_sem = r.z1.sem();
  out.reps = reps;
  return out;
}

}  // namespace stirlab

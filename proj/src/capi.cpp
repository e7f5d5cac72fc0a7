#include "stirlab/stirlab.h"

#include <cstring>
#include <new>
#include <string>

#include "core/estimators.hpp"
#include "core/genealogy.hpp"
#include "core/simulator.hpp"
#include "core/walk.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <class F>
stir_status guarded(F&& f) {
  try {
    f();
    return STIR_OK;
  } catch (const stirlab::DivergentSeriesError& e) {
    set_error(e.what());
    return STIR_E_DIVERGENT;
  } catch (const stirlab::ResourceError& e) {
    set_error(e.what());
    return STIR_E_BUDGET;
  } catch (const stirlab::TruncationError& e) {
    set_error(e.what());
    return STIR_E_TRUNCATION;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return STIR_E_ARG;
  } catch (const std::domain_error& e) {
    set_error(e.what());
    return STIR_E_ARG;
  } catch (const std::logic_error& e) {
    set_error(e.what());
    return STIR_E_ARG;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return STIR_E_BUDGET;
  } catch (const std::runtime_error& e) {
    set_error(e.what());
    return STIR_E_QUADRATURE;
  } catch (...) {
    set_error("unknown internal error");
    return STIR_E_INTERNAL;
  }
}

stir_status require(bool ok, const char* msg) {
  if (ok) return STIR_OK;
  set_error(msg);
  return STIR_E_ARG;
}

stirlab::ModelParams to_model(const stir_model_params& p) {
  stirlab::ModelParams m;
  m.d = p.d;
  m.stirring = p.N;
  m.lambda = p.lambda;
  m.speeded_up = p.speeded_up != 0;
  return m;
}

stirlab::StopPolicy to_policy(const stir_stop_policy& s) {
  stirlab::StopPolicy out;
  out.horizon = s.horizon;
  out.mass_cap = s.mass_cap;
  if (s.checkpoints != nullptr)
    out.checkpoints.assign(s.checkpoints, s.checkpoints + s.n_checkpoints);
  if (s.event_budget > 0) out.event_budget = s.event_budget;
  return out;
}

}  // namespace

struct stir_walk {
  stirlab::WalkAnalytics impl;
  explicit stir_walk(int d) : impl(d) {}
};

struct stir_scan {
  stirlab::CriticalScanResult result;
  std::string joined_flags;
};

extern "C" {

const char* stir_status_name(stir_status s) {
  switch (s) {
    case STIR_OK:
      return "ok";
    case STIR_E_ARG:
      return "invalid argument";
    case STIR_E_DIVERGENT:
      return "divergent series";
    case STIR_E_BUDGET:
      return "budget exceeded";
    case STIR_E_TRUNCATION:
      return "insufficient truncation";
    case STIR_E_QUADRATURE:
      return "quadrature failure";
    case STIR_E_INTERNAL:
      return "internal error";
  }
  return "unknown";
}

const char* stir_last_error(void) { return g_last_error.c_str(); }

const char* stir_version(void) { return "0.1.0"; }

uint64_t stir_mix_seed(uint64_t master, uint64_t stream) {
  return stirlab::mix_seed(master, stream);
}

stir_status stir_walk_create(int d, stir_walk** out) {
  if (stir_status s = require(out != nullptr, "null output"); s != STIR_OK)
    return s;
  *out = nullptr;
  return guarded([&] { *out = new stir_walk(d); });
}

void stir_walk_free(stir_walk* w) { delete w; }

stir_status stir_walk_return_prob(stir_walk* w, int n, double* out) {
  if (stir_status s = require(w && out, "null argument"); s != STIR_OK)
    return s;
  return guarded([&] { *out = w->impl.origin_prob(n); });
}

stir_status stir_walk_neighbor_prob(stir_walk* w, int n, double* out) {
  if (stir_status s = require(w && out, "null argument"); s != STIR_OK)
    return s;
  return guarded([&] { *out = w->impl.neighbor_prob(n); });
}

stir_status stir_walk_identity_residual(stir_walk* w, int n_max, double* out) {
  if (stir_status s = require(w && out, "null argument"); s != STIR_OK)
    return s;
  return guarded([&] { *out = w->impl.identity_residual(n_max); });
}

stir_status stir_walk_series(stir_walk* w, double tol, int n_cap,
                             stir_series_result* out) {
  if (stir_status s = require(w && out, "null argument"); s != STIR_OK)
    return s;
  return guarded([&] {
    const stirlab::SeriesResult r = w->impl.series(tol, n_cap);
    out->d = r.d;
    out->n_used = r.n_used;
    out->partial_sum = r.partial_sum;
    out->tail_bound = r.tail_bound;
    out->theta = r.theta;
    out->green = r.green;
    out->tolerance = r.tolerance;
    out->converged = r.converged ? 1 : 0;
  });
}

stir_status stir_walk_h(stir_walk* w, double u, int n_max, double* out) {
  if (stir_status s = require(w && out, "null argument"); s != STIR_OK)
    return s;
  return guarded([&] { *out = w->impl.h_function(u, n_max); });
}

stir_status stir_walk_occupation_analytic(stir_walk* w, double N, double t,
                                          double* out) {
  if (stir_status s = require(w && out, "null argument"); s != STIR_OK)
    return s;
  return guarded([&] { *out = w->impl.occupation_analytic(N, t); });
}

stir_status stir_walk_pmf(stir_walk* w, int n, const int32_t* x, double* out) {
  if (stir_status s = require(w && x && out, "null argument"); s != STIR_OK)
    return s;
  return guarded([&] {
    w->impl.ensure(n);
    // Query through a one-shot pmf of the needed depth would be wasteful;
    // the scalar cache answers canonical points only, so fold here.
    stirlab::WalkPmf pmf(w->impl.dim(), n);
    stirlab::Point p;
    for (int i = 0; i < w->impl.dim(); ++i) p.c[i] = x[i];
    *out = pmf.prob(n, p);
  });
}

stir_status stir_occupation_mc(int d, double N, double t, uint64_t reps,
                               uint64_t seed, int threads, char chain,
                               stir_estimate* out) {
  if (stir_status s = require(out != nullptr, "null output"); s != STIR_OK)
    return s;
  if (stir_status s = require(chain == 'v' || chain == 'w',
                              "chain must be 'v' or 'w'");
      s != STIR_OK)
    return s;
  return guarded([&] {
    const stirlab::OccupationEstimate e =
        chain == 'v' ? stirlab::simulate_v_occupation(d, N, t, reps, seed,
                                                      threads)
                     : stirlab::simulate_w_occupation(d, N, t, reps, seed,
                                                      threads);
    out->mean = e.mean;
    out->sem = e.sem;
    out->reps = e.reps;
  });
}

stir_status stir_lineage_mc(int d, double N, double theta, uint64_t reps,
                            uint64_t seed, int threads,
                            stir_lineage_result* out) {
  if (stir_status s = require(out != nullptr, "null output"); s != STIR_OK)
    return s;
  return guarded([&] {
    stirlab::LineageParams p;
    p.d = d;
    p.stirring = N;
    p.theta = theta;
    const stirlab::LineageEstimate e =
        stirlab::estimate_z1(p, reps, seed, threads);
    out->f1_mean = e.f1_mean;
    out->f1_sem = e.f1_sem;
    out->z1_mean = e.z1_mean;
    out->z1_sem = e.z1_sem;
    out->reps = e.reps;
  });
}

stir_status stir_f1_analytic(double N, double theta, double* out) {
  if (stir_status s = require(out != nullptr, "null output"); s != STIR_OK)
    return s;
  return guarded([&] {
    stirlab::LineageParams p;
    p.stirring = N;
    p.theta = theta;
    *out = stirlab::f1_analytic(p);
  });
}

stir_status stir_z1_analytic(stir_walk* w, double N, double theta, int variant,
                             double* out) {
  if (stir_status s = require(w && out, "null argument"); s != STIR_OK)
    return s;
  if (stir_status s = require(variant == 0 || variant == 1,
                              "variant must be 0 or 1");
      s != STIR_OK)
    return s;
  return guarded([&] {
    stirlab::LineageParams p;
    p.d = w->impl.dim();
    p.stirring = N;
    p.theta = theta;
    *out = stirlab::z1_analytic(w->impl, p,
                                variant == 0
                                    ? stirlab::Z1Exponent::f1_consistent
                                    : stirlab::Z1Exponent::alternate);
  });
}

stir_status stir_run_trajectory(const stir_model_params* p,
                                const stir_stop_policy* stop, uint64_t seed,
                                stir_trajectory_summary* out,
                                uint64_t* mass_out, int64_t* pairs_out) {
  if (stir_status s = require(p && stop && out, "null argument"); s != STIR_OK)
    return s;
  return guarded([&] {
    const stirlab::TrajectorySummary t =
        stirlab::run_trajectory(to_model(*p), to_policy(*stop), seed);
    out->outcome = static_cast<int>(t.outcome);
    out->outcome_time = t.outcome_time;
    out->event_count = t.event_count;
    for (size_t i = 0; i < t.mass_samples.size(); ++i) {
      if (mass_out) mass_out[i] = t.mass_samples[i];
      if (pairs_out) pairs_out[i] = t.pair_samples[i];
    }
  });
}

stir_status stir_mass_curve(const stir_model_params* p,
                            const stir_stop_policy* stop, uint64_t reps,
                            uint64_t seed, int threads, double* mass_mean,
                            double* mass_sem, double* pairs_mean,
                            double* pairs_sem, double* drop_mean,
                            double* drop_sem) {
  if (stir_status s = require(p && stop, "null argument"); s != STIR_OK)
    return s;
  return guarded([&] {
    const auto curve = stirlab::mass_curve(to_model(*p), to_policy(*stop),
                                           reps, seed, threads);
    for (size_t i = 0; i < curve.size(); ++i) {
      if (mass_mean) mass_mean[i] = curve[i].mass_mean;
      if (mass_sem) mass_sem[i] = curve[i].mass_sem;
      if (pairs_mean) pairs_mean[i] = curve[i].pairs_mean;
      if (pairs_sem) pairs_sem[i] = curve[i].pairs_sem;
      if (drop_mean) drop_mean[i] = curve[i].drop_mean;
      if (drop_sem) drop_sem[i] = curve[i].drop_sem;
    }
  });
}

stir_status stir_survival(const stir_model_params* p,
                          const stir_stop_policy* stop, uint64_t reps,
                          uint64_t seed, int threads,
                          stir_survival_estimate* out) {
  if (stir_status s = require(p && stop && out, "null argument"); s != STIR_OK)
    return s;
  return guarded([&] {
    const stirlab::SurvivalEstimate e = stirlab::survival_probability(
        to_model(*p), to_policy(*stop), reps, seed, threads);
    out->reps = e.reps;
    out->successes = e.successes;
    out->rho_hat = e.rho_hat;
    out->ci_low = e.ci_low;
    out->ci_high = e.ci_high;
  });
}

stir_status stir_wilson(uint64_t successes, uint64_t trials, double z,
                        double* low, double* high) {
  if (stir_status s = require(low && high, "null output"); s != STIR_OK)
    return s;
  return guarded([&] {
    const stirlab::WilsonInterval w =
        stirlab::wilson_interval(successes, trials, z);
    *low = w.low;
    *high = w.high;
  });
}

stir_status stir_scan_run(int d, double N, const stir_scan_settings* settings,
                          const stir_stop_policy* stop, uint64_t seed,
                          int threads, stir_scan** out) {
  if (stir_status s = require(stop && out, "null argument"); s != STIR_OK)
    return s;
  *out = nullptr;
  return guarded([&] {
    stirlab::ScanSettings s;
    if (settings) {
      if (settings->threshold > 0.0) s.threshold = settings->threshold;
      if (settings->reps_initial > 0) s.reps_initial = settings->reps_initial;
      if (settings->reps_cap > 0) s.reps_cap = settings->reps_cap;
      s.tol_lambda = settings->tol_lambda;
      s.theta_ref = settings->theta_ref;
    }
    if (s.theta_ref <= 0.0) {
      stirlab::WalkAnalytics walk(d);
      s.theta_ref = walk.series(1e-2).theta;
    }
    auto* scan = new stir_scan;
    scan->result =
        stirlab::critical_scan(d, N, s, to_policy(*stop), seed, threads);
    for (const std::string& f : scan->result.flags) {
      if (!scan->joined_flags.empty()) scan->joined_flags += ';';
      scan->joined_flags += f;
    }
    *out = scan;
  });
}

void stir_scan_free(stir_scan* s) { delete s; }

stir_status stir_scan_bracket(const stir_scan* s, double* lambda_lo,
                              double* lambda_hat, double* lambda_hi) {
  if (stir_status st = require(s != nullptr, "null scan"); st != STIR_OK)
    return st;
  if (lambda_lo) *lambda_lo = s->result.lambda_lo;
  if (lambda_hat) *lambda_hat = s->result.lambda_hat;
  if (lambda_hi) *lambda_hi = s->result.lambda_hi;
  return STIR_OK;
}

int stir_scan_inconclusive(const stir_scan* s) {
  return s && s->result.inconclusive ? 1 : 0;
}

size_t stir_scan_n_levels(const stir_scan* s) {
  return s ? s->result.levels.size() : 0;
}

stir_status stir_scan_level_at(const stir_scan* s, size_t i,
                               stir_scan_level* out) {
  if (stir_status st = require(s && out, "null argument"); st != STIR_OK)
    return st;
  if (stir_status st = require(i < s->result.levels.size(),
                               "level index out of range");
      st != STIR_OK)
    return st;
  const stirlab::ScanLevel& l = s->result.levels[i];
  out->lambda = l.lambda;
  out->reps = l.reps;
  out->successes = l.successes;
  out->rho_hat = l.rho_hat;
  out->ci_low = l.ci_low;
  out->ci_high = l.ci_high;
  out->verdict = l.verdict;
  return STIR_OK;
}

const char* stir_scan_flags(const stir_scan* s) {
  static const char* empty = "";
  return s ? s->joined_flags.c_str() : empty;
}

}  // extern "C"

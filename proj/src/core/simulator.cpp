#include "simulator.hpp"

#include <cmath>

#include "parallel.hpp"
#include "rng.hpp"

namespace stirlab {

namespace {

// Flush all checkpoints in [from, to) with the current state; the process
// is right-continuous, so the state set at `from` rules that window.
struct CheckpointCursor {
  const std::vector<double>* times;
  std::size_t next = 0;

  void flush(double to, const Configuration& cfg, TrajectorySummary& out) {
    while (next < times->size() && (*times)[next] < to) {
      out.mass_samples.push_back(cfg.size());
      out.pair_samples.push_back(cfg.ordered_pair_count());
      ++next;
    }
  }
  void finish(const Configuration& cfg, TrajectorySummary& out) {
    while (next < times->size()) {
      out.mass_samples.push_back(cfg.size());
      out.pair_samples.push_back(cfg.ordered_pair_count());
      ++next;
    }
  }
};

}  // namespace

TrajectorySummary run_trajectory(const ModelParams& p, const StopPolicy& stop,
                                 std::uint64_t seed,
                                 std::span<const Point> initial) {
  p.validate();
  stop.validate();

  Configuration cfg(p.d);
  for (const Point& x : initial) cfg.insert(x);

  Rng rng(seed);
  TrajectorySummary out;
  out.mass_samples.reserve(stop.checkpoints.size());
  out.pair_samples.reserve(stop.checkpoints.size());
  CheckpointCursor cursor{&stop.checkpoints};

  // Per-particle rates in reported time units. The speeded-up process is
  // the same event stream with all rates scaled by N.
  const double scale = p.speeded_up ? p.stirring : 1.0;
  const double death_rate = scale * 1.0;
  const double birth_rate = scale * p.lambda;
  const double stir_rate = scale * 2.0 * p.d * p.stirring;
  const double per_particle = death_rate + birth_rate + stir_rate;
  const double p_death = death_rate / per_particle;
  const double p_birth = birth_rate / per_particle;

  double now = 0.0;
  for (;;) {
    if (cfg.empty()) {
      out.outcome = Outcome::extinct;
      out.outcome_time = now;
      cursor.finish(cfg, out);
      return out;
    }
    if (cfg.size() >= stop.mass_cap) {
      out.outcome = Outcome::mass_cap;
      out.outcome_time = now;
      cursor.finish(cfg, out);
      return out;
    }
    if (out.event_count >= stop.event_budget) {
      out.outcome = Outcome::truncated;
      out.outcome_time = now;
      cursor.finish(cfg, out);
      return out;
    }

    const double total_rate = per_particle * static_cast<double>(cfg.size());
    const double dt = rng.exponential(total_rate);
    if (now + dt >= stop.horizon) {
      cursor.flush(stop.horizon, cfg, out);
      cursor.finish(cfg, out);
      out.outcome = Outcome::horizon;
      out.outcome_time = stop.horizon;
      return out;
    }
    cursor.flush(now + dt, cfg, out);
    now += dt;
    ++out.event_count;

    const Point x = cfg.site(rng.below(static_cast<std::uint32_t>(cfg.size())));
    const double u = rng.uniform();
    if (u < p_death) {
      cfg.apply_death(x);
    } else {
      const Point y = step(
          x, static_cast<int>(rng.below(static_cast<std::uint32_t>(2 * p.d))));
      if (u < p_death + p_birth) {
        cfg.apply_birth(x, y);  // suppressed onto occupied sites
      } else {
        cfg.apply_jump(x, y);  // occupied target: swap, no set change
      }
    }
  }
}

TrajectorySummary run_trajectory(const ModelParams& p, const StopPolicy& stop,
                                 std::uint64_t seed) {
  const Point start = origin();
  return run_trajectory(p, stop, seed, std::span<const Point>(&start, 1));
}

namespace {

struct CurveAccumulator {
  std::vector<MeanAccumulator> mass;
  std::vector<MeanAccumulator> pairs;
  std::vector<MeanAccumulator> drops;
  bool init = false;

  void size_to(std::size_t k) {
    if (!init) {
      mass.resize(k);
      pairs.resize(k);
      drops.resize(k);
      init = true;
    }
  }
  void merge(const CurveAccumulator& o) {
    if (!o.init) return;
    size_to(o.mass.size());
    for (std::size_t i = 0; i < mass.size(); ++i) {
      mass[i].merge(o.mass[i]);
      pairs[i].merge(o.pairs[i]);
      drops[i].merge(o.drops[i]);
    }
  }
};

}  // namespace

std::vector<MassCurvePoint> mass_curve(const ModelParams& p,
                                       const StopPolicy& stop,
                                       std::uint64_t reps, std::uint64_t seed,
                                       int threads) {
  if (stop.checkpoints.empty())
    throw std::invalid_argument("mass_curve needs at least one checkpoint");
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  p.validate();
  stop.validate();

  auto acc = run_replicates<CurveAccumulator>(
      reps, threads, [&](std::uint64_t r, CurveAccumulator& out) {
        out.size_to(stop.checkpoints.size());
        const TrajectorySummary t =
            run_trajectory(p, stop, mix_seed(seed, r));
        double prev = 1.0;  // |delta_0|
        for (std::size_t i = 0; i < stop.checkpoints.size(); ++i) {
          const double m = static_cast<double>(t.mass_samples[i]);
          out.mass[i].add(m);
          out.pairs[i].add(static_cast<double>(t.pair_samples[i]));
          out.drops[i].add(prev - m);
          prev = m;
        }
      });

  std::vector<MassCurvePoint> curve(stop.checkpoints.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    curve[i].t = stop.checkpoints[i];
    curve[i].mass_mean = acc.mass[i].mean();
    curve[i].mass_sem = acc.mass[i].sem();
    curve[i].pairs_mean = acc.pairs[i].mean();
    curve[i].pairs_sem = acc.pairs[i].sem();
    curve[i].drop_mean = acc.drops[i].mean();
    curve[i].drop_sem = acc.drops[i].sem();
  }
  return curve;
}

namespace {

struct TimeSampleAccumulator {
  std::vector<std::pair<std::uint64_t, double>> samples;
  void merge(const TimeSampleAccumulator& o) {
    samples.insert(samples.end(), o.samples.begin(), o.samples.end());
  }
};

}  // namespace

std::vector<double> extinction_time_sample(const ModelParams& p,
                                           const StopPolicy& stop,
                                           std::uint64_t reps,
                                           std::uint64_t seed, int threads) {
  auto acc = run_replicates<TimeSampleAccumulator>(
      reps, threads, [&](std::uint64_t r, TimeSampleAccumulator& out) {
        const TrajectorySummary t =
            run_trajectory(p, stop, mix_seed(seed, r));
        out.samples.emplace_back(r, t.outcome_time);
      });
  std::vector<double> times(reps);
  for (const auto& [r, t] : acc.samples) times[r] = t;
  return times;
}

}  // namespace stirlab

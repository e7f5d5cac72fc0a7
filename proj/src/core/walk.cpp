#include "walk.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "parallel.hpp"

namespace stirlab {
namespace detail {

SortedSimplexIndex::SortedSimplexIndex(int d, int l1_limit)
    : d_(d), limit_(l1_limit) {
  check_dimension(d);
  if (l1_limit < 0) throw std::invalid_argument("negative table radius");
  const std::size_t l = static_cast<std::size_t>(limit_) + 1;
  stride_ = l * l;
  prefix_.assign(static_cast<std::size_t>(d_ + 1) * stride_, 0);
  // prefix_[pos][m][r] counts canonical suffixes (x_pos >= ... >= x_{d-1})
  // with x_pos <= m and sum <= r; pos = d is the empty suffix.
  auto at = [&](int pos, int m, int r) -> std::uint64_t& {
    return prefix_[static_cast<std::size_t>(pos) * stride_ +
                   static_cast<std::size_t>(m) * l + static_cast<std::size_t>(r)];
  };
  for (int m = 0; m <= limit_; ++m)
    for (int r = 0; r <= limit_; ++r) at(d_, m, r) = 1;
  for (int pos = d_ - 1; pos >= 0; --pos) {
    for (int m = 0; m <= limit_; ++m) {
      for (int r = 0; r <= limit_; ++r) {
        std::uint64_t v = (m > 0) ? at(pos, m - 1, r) : 0;
        if (m <= r) v += at(pos + 1, m, r - m);
        at(pos, m, r) = v;
      }
    }
  }
  size_ = at(0, limit_, limit_);
}

std::size_t SortedSimplexIndex::rank(const std::int32_t* x) const {
  std::size_t r = 0;
  int rem = limit_;
  for (int i = 0; i < d_; ++i) {
    if (x[i] > 0) r += prefix(i, x[i] - 1, rem);
    rem -= x[i];
  }
  return r;
}

std::uint64_t SortedSimplexIndex::orbit_size(const std::int32_t* x, int d) {
  static constexpr std::uint64_t kFactorial[] = {1,    1,     2,     6,    24,
                                                 120,  720,   5040,  40320};
  std::uint64_t perms = kFactorial[d];
  int nonzero = 0;
  int run = 1;
  for (int i = 1; i <= d; ++i) {
    if (i < d && x[i] == x[i - 1]) {
      ++run;
    } else {
      perms /= kFactorial[run];
      run = 1;
    }
  }
  for (int i = 0; i < d; ++i)
    if (x[i] != 0) ++nonzero;
  return perms << nonzero;
}

}  // namespace detail

namespace {

// Canonicalize a sorted tuple after coordinate `i` changed by +-1 (with a
// -1 already reflected to +1). Returns the rank-ready array in place.
inline void resort_after_bump(std::int32_t* x, int d, int i, bool increased) {
  if (increased) {
    while (i > 0 && x[i - 1] < x[i]) {
      std::swap(x[i - 1], x[i]);
      --i;
    }
  } else {
    while (i + 1 < d && x[i + 1] > x[i]) {
      std::swap(x[i + 1], x[i]);
      ++i;
    }
  }
}

// sum_{n >= first, step 2} n^{-s}, by direct summation plus an
// Euler-Maclaurin remainder. Accurate to ~1e-14 relative for s > 1.
double lattice_tail_sum(double s, int first) {
  constexpr int kDirect = 20000;
  double sum = 0.0;
  for (int k = kDirect - 1; k >= 0; --k)
    sum += std::pow(static_cast<double>(first + 2 * k), -s);
  const double x = static_cast<double>(first + 2 * kDirect);
  sum += std::pow(x, 1.0 - s) / (2.0 * (s - 1.0));  // integral remainder
  sum += 0.5 * std::pow(x, -s);
  sum += (s / 6.0) * std::pow(x, -s - 1.0);  // -f'(K)/12 with dk step 2
  return sum;
}

struct TailBracket {
  double low = 0.0;
  double high = 0.0;
};

// Conservative bracket on sum_{n > n_last, same parity} term(n), fitting
// term(n) ~ C n^{-d/2} to the last `window` nonzero terms and applying a
// 1.5x safety factor on both sides.
TailBracket fit_tail(const std::vector<std::pair<int, double>>& terms,
                     double s, int window) {
  const int m = static_cast<int>(terms.size());
  const int lo = std::max(0, m - window);
  double c_hi = 0.0;
  double c_lo = std::numeric_limits<double>::infinity();
  for (int i = lo; i < m; ++i) {
    const double c = terms[i].second * std::pow(terms[i].first, s);
    c_hi = std::max(c_hi, c);
    c_lo = std::min(c_lo, c);
  }
  const int n_last = terms.back().first;
  const double geom = lattice_tail_sum(s, n_last + 2);
  return TailBracket{(c_lo / 1.5) * geom, (c_hi * 1.5) * geom};
}

// Adaptive Simpson with absolute tolerance derived from the first whole
// estimate; throws std::runtime_error on non-convergence.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol) {
  struct Frame {
    double a, b, fa, fm, fb, whole;
    int depth;
  };
  auto simpson = [](double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, b - a);
  const double abs_tol =
      std::max(std::abs(whole) * rel_tol, std::numeric_limits<double>::min());

  double total = 0.0;
  std::vector<Frame> stack;
  stack.push_back({a, b, fa, fm, fb, whole, 0});
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    const double m = 0.5 * (fr.a + fr.b);
    const double flm = f(0.5 * (fr.a + m));
    const double frm = f(0.5 * (m + fr.b));
    const double left = simpson(fr.fa, flm, fr.fm, m - fr.a);
    const double right = simpson(fr.fm, frm, fr.fb, fr.b - m);
    const double err = left + right - fr.whole;
    const double local_tol = abs_tol * (fr.b - fr.a) / (b - a);
    if (std::abs(err) <= 15.0 * std::max(local_tol, 1e-300) || fr.depth >= 40) {
      if (fr.depth >= 40 && std::abs(err) > 1e3 * abs_tol)
        throw std::runtime_error("quadrature failed to converge");
      total += left + right + err / 15.0;
    } else {
      stack.push_back({fr.a, m, fr.fa, flm, fr.fm, left, fr.depth + 1});
      stack.push_back({m, fr.b, fr.fm, frm, fr.fb, right, fr.depth + 1});
    }
  }
  return total;
}

std::uint64_t index_bytes(int d, int limit) {
  const std::uint64_t l = static_cast<std::uint64_t>(limit) + 1;
  return (d + 1) * l * l * sizeof(std::uint64_t);
}

}  // namespace

// ---------------------------------------------------------------------------
// Streaming DP state shared by WalkAnalytics.

struct WalkAnalytics::Dp {
  int d;
  int n = 0;  // cur holds p_n
  detail::SortedSimplexIndex index;
  std::vector<double> cur, nxt;

  Dp(int dim, int limit) : d(dim), index(dim, limit) {
    cur.assign(index.size(), 0.0);
    nxt.assign(index.size(), 0.0);
    cur[0] = 1.0;  // rank of the origin is 0
  }

  void grow(int new_limit, std::uint64_t budget) {
    detail::SortedSimplexIndex bigger(d, new_limit);
    const std::uint64_t bytes =
        2 * bigger.size() * sizeof(double) + index_bytes(d, new_limit);
    if (bytes > budget)
      throw ResourceError(
          "walk table for radius " + std::to_string(new_limit) + " needs " +
              std::to_string(bytes) + " bytes (budget " +
              std::to_string(budget) + ")",
          bytes);
    std::vector<double> fresh(bigger.size(), 0.0);
    index.for_each(n, n & 1, [&](const std::int32_t* x, std::size_t r) {
      fresh[bigger.rank(x)] = cur[r];
    });
    index = std::move(bigger);
    cur = std::move(fresh);
    nxt.assign(index.size(), 0.0);
  }

  // One convolution step: cur = p_n -> nxt = p_{n+1}, then swap.
  void step() {
    const int target = n + 1;
    const double inv = 1.0 / (2.0 * d);
    std::array<std::int32_t, kMaxDim> tmp;
    index.for_each(target, target & 1, [&](const std::int32_t* y, std::size_t r) {
      int l1 = 0;
      for (int i = 0; i < d; ++i) l1 += y[i];
      double acc = 0.0;
      for (int i = 0; i < d; ++i) {
        const std::int32_t yi = y[i];
        // +1 move
        if (l1 + 1 <= n) {
          std::memcpy(tmp.data(), y, sizeof(std::int32_t) * kMaxDim);
          tmp[i] = yi + 1;
          resort_after_bump(tmp.data(), d, i, true);
          acc += cur[index.rank(tmp.data())];
        }
        // -1 move (reflected to +1 when yi == 0)
        const int delta = (yi == 0) ? 1 : -1;
        if (l1 + delta <= n) {
          std::memcpy(tmp.data(), y, sizeof(std::int32_t) * kMaxDim);
          tmp[i] = (yi == 0) ? 1 : yi - 1;
          resort_after_bump(tmp.data(), d, i, yi == 0);
          acc += cur[index.rank(tmp.data())];
        }
      }
      nxt[r] = acc * inv;
    });
    cur.swap(nxt);
    ++n;
  }

  double at(const std::int32_t* canonical) const {
    return cur[index.rank(canonical)];
  }
};

WalkAnalytics::WalkAnalytics(int d, std::uint64_t memory_budget_bytes)
    : d_(d), budget_(memory_budget_bytes) {
  check_dimension(d);
  dp_ = std::make_unique<Dp>(d, 64);
  p0_.push_back(1.0);
  pe1_.push_back(0.0);
  p2e1_.push_back(0.0);
  pe1e2_.push_back(0.0);
  a_.push_back(0.0);
}

WalkAnalytics::~WalkAnalytics() = default;
WalkAnalytics::WalkAnalytics(WalkAnalytics&&) noexcept = default;
WalkAnalytics& WalkAnalytics::operator=(WalkAnalytics&&) noexcept = default;

void WalkAnalytics::ensure(int n) {
  if (n < 0) throw std::invalid_argument("negative step count");
  while (dp_->n < n) {
    if (dp_->n + 1 > dp_->index.limit()) {
      const int want = dp_->n + 1;
      try {
        dp_->grow(std::max(want, dp_->index.limit() * 2), budget_);
      } catch (const ResourceError&) {
        dp_->grow(want, budget_);  // rethrows if even the minimum is too big
      }
    }
    dp_->step();
    const int m = dp_->n;
    std::array<std::int32_t, kMaxDim> x{};
    double pe1 = 0.0, p0 = 0.0, p2 = 0.0, p11 = 0.0;
    if (m & 1) {
      x[0] = 1;
      pe1 = dp_->at(x.data());
    } else {
      p0 = dp_->cur[0];
      if (m >= 2) {
        x[0] = 2;
        p2 = dp_->at(x.data());
        if (d_ >= 2) {
          x[0] = 1;
          x[1] = 1;
          p11 = dp_->at(x.data());
        }
      }
    }
    p0_.push_back(p0);
    pe1_.push_back(pe1);
    p2e1_.push_back(p2);
    pe1e2_.push_back(p11);
    a_.push_back(2.0 * d_ * pe1);
  }
}

double WalkAnalytics::origin_prob(int n) {
  ensure(n);
  return p0_[static_cast<std::size_t>(n)];
}

double WalkAnalytics::neighbor_prob(int n) {
  ensure(n);
  return a_[static_cast<std::size_t>(n)];
}

double WalkAnalytics::shifted_neighbor_prob(int n) {
  ensure(n);
  const std::size_t i = static_cast<std::size_t>(n);
  return p0_[i] + p2e1_[i] + (2.0 * d_ - 2.0) * pe1e2_[i];
}

double WalkAnalytics::identity_residual(int n_max) {
  if (n_max < 1) throw std::invalid_argument("identity check needs n_max >= 1");
  ensure(n_max);
  double worst = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double lhs = p0_[static_cast<std::size_t>(n)];
    const double rhs = a_[static_cast<std::size_t>(n - 1)] / (2.0 * d_);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

SeriesResult WalkAnalytics::series(double tol, int n_cap) {
  if (d_ <= 2)
    throw DivergentSeriesError(
        "neighborhood occupation series diverges for d <= 2");
  if (tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
  if (n_cap <= 0) {
    // Default cap keeps one series call around 2.5e8 table visits.
    double fac = 1.0;
    for (int i = 1; i <= d_; ++i) fac *= 2.0 * i;  // d! * 2^d
    n_cap = static_cast<int>(
        std::pow(2.5e8 * (d_ + 1) * fac, 1.0 / (d_ + 1)));
    n_cap = std::max(n_cap, 81);
  }

  SeriesResult out;
  out.d = d_;
  const double inv4d2 = 1.0 / (4.0 * d_ * d_);
  const double s = 0.5 * d_;
  const int window = 10;

  int n = std::min(n_cap, 81);
  for (;;) {
    bool out_of_budget = false;
    try {
      ensure(n + 1);
    } catch (const ResourceError&) {
      // Best effort: fall back to whatever has been built already.
      out_of_budget = true;
      n = built() - 1;
      if (n < 21) throw;
    }
    // Odd terms feed S_d; even terms (shifted by one) feed G.
    std::vector<std::pair<int, double>> s_terms, g_terms;
    double s_partial = 0.0, g_partial = 0.0;
    for (int k = 1; k <= n; k += 2) {
      s_terms.emplace_back(k, a_[static_cast<std::size_t>(k)]);
      s_partial += a_[static_cast<std::size_t>(k)];
    }
    for (int k = 2; k <= n + 1; k += 2) {
      g_terms.emplace_back(k, p0_[static_cast<std::size_t>(k)]);
      g_partial += p0_[static_cast<std::size_t>(k)];
    }
    const TailBracket st = fit_tail(s_terms, s, window);
    const TailBracket gt = fit_tail(g_terms, s, window);

    out.n_used = n;
    out.partial_sum = s_partial;
    out.tail_bound = st.high;
    out.theta = (s_partial + 0.5 * (st.low + st.high)) * inv4d2;
    out.green = 1.0 + g_partial + 0.5 * (gt.low + gt.high);
    out.tolerance = 0.5 * (st.high - st.low) * inv4d2;
    out.converged = out.tolerance <= tol &&
                    0.5 * (gt.high - gt.low) <= 2.0 * d_ * tol;
    if (out.converged || out_of_budget || n >= n_cap) break;
    n = std::min(n_cap, n * 2 + 1);
    if (!(n & 1)) ++n;  // keep the last S term an odd index
  }
  return out;
}

double WalkAnalytics::h_function(double u, int n_max) {
  if (u < 0.0) throw std::invalid_argument("h(u) needs u >= 0");
  // Required truncation: Poisson(u) tail above it under 1e-10.
  double term = std::exp(-u);
  if (term == 0.0)
    throw TruncationError("Poissonized time too large for double precision",
                          std::numeric_limits<int>::max());
  int required = 0;
  for (;; ++required) {
    const double next = term * u / (required + 1);
    if (required + 1 > u && next / (1.0 - u / (required + 2)) < 1e-10) break;
    term = next;
  }
  if (n_max > 0 && required > n_max)
    throw TruncationError("h(" + std::to_string(u) + ") needs n_max >= " +
                              std::to_string(required) + ", got " +
                              std::to_string(n_max),
                          required);
  const int n_use = (n_max > 0) ? n_max : required;
  ensure(n_use);
  double value = 0.0;
  term = std::exp(-u);
  for (int k = 0; k <= n_use; ++k) {
    value += term * shifted_neighbor_prob(k);
    term *= u / (k + 1);
  }
  return value;
}

double WalkAnalytics::origin_h_function(double u) {
  if (u < 0.0) throw std::invalid_argument("needs u >= 0");
  double term = std::exp(-u);
  double value = 0.0;
  int k = 0;
  for (;; ++k) {
    ensure(k);
    value += term * a_[static_cast<std::size_t>(k)];
    const double next = term * u / (k + 1);
    if (k > u && next / (1.0 - u / (k + 2)) < 1e-12) break;
    term = next;
  }
  return value;
}

double WalkAnalytics::h_integral(double u, double rel_tol) {
  if (u <= 0.0) return 0.0;
  // Prime the series cache once so quadrature callbacks never grow it in
  // awkward places.
  h_function(u);
  return adaptive_simpson([this](double r) { return h_function(r); }, 0.0, u,
                          rel_tol);
}

double WalkAnalytics::occupation_analytic(double stirring, double t,
                                          double rel_tol) {
  if (stirring <= 0.0 || t < 0.0)
    throw std::invalid_argument("need stirring > 0 and t >= 0");
  const double rate = 4.0 * d_ * stirring * stirring;
  const double upper = rate * t;
  if (upper == 0.0) return 0.0;
  origin_h_function(upper);
  const double integral = adaptive_simpson(
      [this](double r) { return origin_h_function(r); }, 0.0, upper, rel_tol);
  return integral / rate;
}

// ---------------------------------------------------------------------------
// Retained pmf tables.

WalkPmf::WalkPmf(int d, int n_max, std::uint64_t memory_budget_bytes)
    : d_(d), n_max_(n_max), index_(d, std::max(n_max, 1)) {
  check_dimension(d);
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const std::uint64_t bytes =
      (static_cast<std::uint64_t>(n_max) + 2) * index_.size() * sizeof(double) +
      index_bytes(d, std::max(n_max, 1));
  if (bytes > memory_budget_bytes)
    throw ResourceError("pmf tables to n_max " + std::to_string(n_max) +
                            " need " + std::to_string(bytes) +
                            " bytes (budget " +
                            std::to_string(memory_budget_bytes) + ")",
                        bytes);

  tables_.assign(static_cast<std::size_t>(n_max) + 1,
                 std::vector<double>(index_.size(), 0.0));
  tables_[0][0] = 1.0;
  std::array<std::int32_t, kMaxDim> tmp;
  const double inv = 1.0 / (2.0 * d_);
  for (int n = 1; n <= n_max; ++n) {
    const std::vector<double>& prev = tables_[static_cast<std::size_t>(n - 1)];
    std::vector<double>& next = tables_[static_cast<std::size_t>(n)];
    index_.for_each(n, n & 1, [&](const std::int32_t* y, std::size_t r) {
      int l1 = 0;
      for (int i = 0; i < d_; ++i) l1 += y[i];
      double acc = 0.0;
      for (int i = 0; i < d_; ++i) {
        const std::int32_t yi = y[i];
        if (l1 + 1 <= n - 1) {
          std::memcpy(tmp.data(), y, sizeof(std::int32_t) * kMaxDim);
          tmp[i] = yi + 1;
          resort_after_bump(tmp.data(), d_, i, true);
          acc += prev[index_.rank(tmp.data())];
        }
        const int delta = (yi == 0) ? 1 : -1;
        if (l1 + delta <= n - 1) {
          std::memcpy(tmp.data(), y, sizeof(std::int32_t) * kMaxDim);
          tmp[i] = (yi == 0) ? 1 : yi - 1;
          resort_after_bump(tmp.data(), d_, i, yi == 0);
          acc += prev[index_.rank(tmp.data())];
        }
      }
      next[r] = acc * inv;
    });
  }
}

double WalkPmf::prob(int n, const Point& x) const {
  if (n < 0 || n > n_max_) throw std::invalid_argument("n out of range");
  std::array<std::int32_t, kMaxDim> folded{};
  std::int64_t l1 = 0;
  for (int i = 0; i < d_; ++i) {
    folded[i] = static_cast<std::int32_t>(std::abs(x.c[i]));
    l1 += folded[i];
  }
  std::sort(folded.begin(), folded.begin() + d_, std::greater<>());
  if (l1 > n || ((l1 ^ n) & 1)) return 0.0;
  return tables_[static_cast<std::size_t>(n)][index_.rank(folded.data())];
}

double WalkPmf::origin_prob(int n) const { return prob(n, origin()); }

double WalkPmf::neighbor_prob(int n) const {
  return 2.0 * d_ * prob(n, unit(0));
}

double WalkPmf::total_mass(int n) const {
  if (n < 0 || n > n_max_) throw std::invalid_argument("n out of range");
  double total = 0.0;
  index_.for_each(n, n & 1, [&](const std::int32_t* x, std::size_t r) {
    total += static_cast<double>(detail::SortedSimplexIndex::orbit_size(x, d_)) *
             tables_[static_cast<std::size_t>(n)][r];
  });
  return total;
}

double WalkPmf::max_markov_residual() const {
  double worst = 0.0;
  for (int n = 1; n <= n_max_; ++n) {
    const double lhs = origin_prob(n);
    const double rhs = neighbor_prob(n - 1) / (2.0 * d_);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Coupled-chain Monte Carlo.

namespace {

struct OccAccumulator {
  MeanAccumulator acc;
  void merge(const OccAccumulator& o) { acc.merge(o.acc); }
};

}  // namespace

OccupationEstimate simulate_v_occupation(int d, double stirring, double t,
                                         std::uint64_t reps,
                                         std::uint64_t seed, int threads) {
  check_dimension(d);
  if (reps < 1 || t <= 0.0 || stirring <= 0.0)
    throw std::invalid_argument("need reps >= 1, t > 0, stirring > 0");
  const double rate = 4.0 * d * stirring * stirring;
  auto result = run_replicates<OccAccumulator>(
      reps, threads, [&](std::uint64_t r, OccAccumulator& out) {
        Rng rng(mix_seed(seed, r));
        Point x = origin();
        double now = 0.0, occupied = 0.0;
        bool inside = false;
        for (;;) {
          const double dt = rng.exponential(rate);
          const double until = std::min(now + dt, t);
          if (inside) occupied += until - now;
          now = until;
          if (now >= t) break;
          x = step(x, static_cast<int>(rng.below(static_cast<std::uint32_t>(2 * d))));
          inside = in_neighborhood(x, d);
        }
        out.acc.add(occupied);
      });
  return OccupationEstimate{result.acc.mean(), result.acc.sem(), reps};
}

Point w_chain_jump(const Point& x, int d, Rng& rng) {
  if (in_neighborhood(x, d)) {
    const std::uint32_t r = rng.below(static_cast<std::uint32_t>(4 * d - 1));
    if (r == 0) {  // shared-edge swap: difference flips sign
      Point y = x;
      for (int i = 0; i < d; ++i) y.c[i] = -y.c[i];
      return y;
    }
    // Remaining 4d-2 outcomes map two-to-one onto the 2d-1 neighbors of x
    // other than the origin.
    const std::uint32_t pick = (r - 1) % static_cast<std::uint32_t>(2 * d - 1);
    int axis = 0;
    std::int32_t sign = 0;
    for (int i = 0; i < d; ++i)
      if (x.c[i] != 0) {
        axis = i;
        sign = x.c[i] > 0 ? 1 : -1;
      }
    const int forbidden = axis * 2 + (sign > 0 ? 1 : 0);  // step toward 0
    const int dir = static_cast<int>(pick) >= forbidden
                        ? static_cast<int>(pick) + 1
                        : static_cast<int>(pick);
    return step(x, dir);
  }
  return step(x, static_cast<int>(rng.below(static_cast<std::uint32_t>(2 * d))));
}

double w_chain_rate(const Point& x, int d, double stirring) {
  const double n2 = stirring * stirring;
  return in_neighborhood(x, d) ? (4.0 * d - 1.0) * n2 : 4.0 * d * n2;
}

OccupationEstimate simulate_w_occupation(int d, double stirring, double t,
                                         std::uint64_t reps,
                                         std::uint64_t seed, int threads) {
  check_dimension(d);
  if (reps < 1 || t <= 0.0 || stirring <= 0.0)
    throw std::invalid_argument("need reps >= 1, t > 0, stirring > 0");
  auto result = run_replicates<OccAccumulator>(
      reps, threads, [&](std::uint64_t r, OccAccumulator& out) {
        Rng rng(mix_seed(seed, r));
        Point x = origin();
        double now = 0.0, occupied = 0.0;
        for (;;) {
          const bool inside = in_neighborhood(x, d);
          const double dt = rng.exponential(w_chain_rate(x, d, stirring));
          const double until = std::min(now + dt, t);
          if (inside) occupied += until - now;
          now = until;
          if (now >= t) break;
          x = w_chain_jump(x, d, rng);
        }
        out.acc.add(occupied);
      });
  return OccupationEstimate{result.acc.mean(), result.acc.sem(), reps};
}

}  // namespace stirlab

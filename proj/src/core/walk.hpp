#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "lattice.hpp"

namespace stirlab {

// Thrown when a table would exceed its memory budget; carries the bytes
// that would have been required.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::uint64_t required)
      : std::runtime_error(what), required_bytes(required) {}
  std::uint64_t required_bytes;
};

class DivergentSeriesError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int required)
      : std::runtime_error(what), required_n(required) {}
  int required_n;
};

namespace detail {

// Rank/unrank for the fundamental domain of the hyperoctahedral symmetry
// of Z^d: tuples x_1 >= x_2 >= ... >= x_d >= 0 with x_1 + ... + x_d <= L.
// Every walk pmf is invariant under coordinate permutations and sign
// flips, so DP tables only ever store this domain.
class SortedSimplexIndex {
 public:
  SortedSimplexIndex() = default;
  SortedSimplexIndex(int d, int l1_limit);

  std::size_t size() const { return size_; }
  int limit() const { return limit_; }
  int dim() const { return d_; }

  // x must be canonical (nonincreasing, nonnegative, sum <= limit).
  std::size_t rank(const std::int32_t* x) const;

  // Number of lattice points in the orbit of a canonical x.
  static std::uint64_t orbit_size(const std::int32_t* x, int d);

  // Calls f(coords, rank) for every canonical point with L1 norm <= l1_max
  // and L1 norm congruent to parity mod 2 (parity < 0: no filter).
  template <class F>
  void for_each(int l1_max, int parity, F&& f) const;

 private:
  // count_[p][m][r]: canonical completions from position p (0-based) with
  // every remaining coordinate <= m and remaining L1 budget r.
  // prefix_[p][m][r] = sum over v in [0, m] of count_[p+1][v][r - v].
  std::uint64_t prefix(int pos, int maxv, int rem) const {
    if (maxv < 0 || rem < 0) return 0;
    if (maxv > rem) maxv = rem;
    return prefix_[static_cast<std::size_t>(pos) * stride_ +
                   static_cast<std::size_t>(maxv) * (limit_ + 1) + rem];
  }

  int d_ = 0;
  int limit_ = 0;
  std::size_t stride_ = 0;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> prefix_;
};

template <class F>
void SortedSimplexIndex::for_each(int l1_max, int parity, F&& f) const {
  std::array<std::int32_t, kMaxDim> x{};
  const int bound = std::min(l1_max, limit_);
  // Depth-first over coordinates; innermost-coordinate ranks are
  // consecutive, which the DP exploits for sequential writes. Ranks are
  // always computed against the full domain limit (rem_rank), while the
  // iteration itself may be restricted to a smaller L1 ball (rem_iter).
  auto rec = [&](auto&& self, int pos, int maxv, int rem_iter, int rem_rank,
                 int used, std::size_t rank_base) -> void {
    if (pos == d_ - 1) {
      const int hi = std::min(maxv, rem_iter);
      for (int v = 0; v <= hi; ++v) {
        if (parity >= 0 && (((used + v) ^ parity) & 1)) continue;
        x[pos] = v;
        f(x.data(), rank_base + static_cast<std::size_t>(v));
      }
      return;
    }
    const int hi = std::min(maxv, rem_iter);
    std::size_t base = rank_base;
    for (int v = 0; v <= hi; ++v) {
      x[pos] = v;
      self(self, pos + 1, v, rem_iter - v, rem_rank - v, used + v, base);
      base += prefix(pos + 1, v, rem_rank - v);
    }
  };
  if (d_ == 1) {
    for (int v = 0; v <= bound; ++v) {
      if (parity >= 0 && ((v ^ parity) & 1)) continue;
      x[0] = v;
      f(x.data(), static_cast<std::size_t>(v));
    }
    return;
  }
  rec(rec, 0, bound, bound, limit_, 0, 0);
}

}  // namespace detail

struct SeriesResult {
  int d = 0;
  int n_used = 0;
  double partial_sum = 0.0;  // sum_{n<=n_used} P(V_n in dd)
  double tail_bound = 0.0;   // conservative upper bound on the neglected tail
  double theta = 0.0;
  double green = 0.0;
  double tolerance = 0.0;  // reported half-width on theta
  bool converged = false;
};

// Exact n-step pmf tables for the simple symmetric walk, retained for
// 0 <= n <= n_max. Storage is one folded table per n.
class WalkPmf {
 public:
  WalkPmf(int d, int n_max, std::uint64_t memory_budget_bytes = kDefaultBudget);

  static constexpr std::uint64_t kDefaultBudget = 1ull << 30;

  int dim() const { return d_; }
  int n_max() const { return n_max_; }

  double prob(int n, const Point& x) const;
  double origin_prob(int n) const;         // p_n(0)
  double neighbor_prob(int n) const;       // P(V_n in dd)
  double total_mass(int n) const;          // sum over the whole lattice
  double max_markov_residual() const;      // max_n |p_n(0) - a_{n-1}/2d|

 private:
  int d_;
  int n_max_;
  detail::SortedSimplexIndex index_;
  std::vector<std::vector<double>> tables_;
};

// Scalar series of the walk needed by every analytic formula:
//   p0[n] = p_n(0), a[n] = P(V_n in dd), q[n] = P(W + V_n in dd)
// with W uniform on dd independent of V. Grows on demand; the DP state
// (last folded table) is kept so extension never restarts from zero.
class WalkAnalytics {
 public:
  explicit WalkAnalytics(int d,
                         std::uint64_t memory_budget_bytes = 1ull << 30);
  ~WalkAnalytics();
  WalkAnalytics(WalkAnalytics&&) noexcept;
  WalkAnalytics& operator=(WalkAnalytics&&) noexcept;

  int dim() const { return d_; }
  int built() const { return static_cast<int>(a_.size()) - 1; }

  void ensure(int n);
  double origin_prob(int n);    // p_n(0)
  double neighbor_prob(int n);  // a_n
  double shifted_neighbor_prob(int n);  // q_n, by convolution with uniform dd

  // max_{1<=n<=n_max} |p_n(0) - (1/2d) a_{n-1}|
  double identity_residual(int n_max);

  // Truncated series for S_d, theta and G(0,0) with fitted power-law tail
  // brackets. n_cap/op_budget <= 0 pick defaults from the memory budget.
  SeriesResult series(double tol, int n_cap = 0);

  // h(u) = P(W + V_{pi(u)} in dd), pi a rate-1 Poisson process.
  // n_max <= 0: truncation chosen so the Poisson tail is below 1e-10.
  double h_function(double u, int n_max = 0);
  // Same Poisson mixture without the uniform-neighbor offset, i.e.
  // P(V_pi(u) in dd) for the walk started at the origin.
  double origin_h_function(double u);

  // E int_0^t 1(V_s^N in dd) ds for the rate-4dN^2 walk from the origin.
  double occupation_analytic(double stirring, double t, double rel_tol = 1e-8);

  // Integral of h over [0, u] by adaptive quadrature (used by genealogy).
  double h_integral(double u, double rel_tol = 1e-6);

 private:
  struct Dp;
  void step_to(int n);

  int d_;
  std::uint64_t budget_;
  std::vector<double> p0_, pe1_, p2e1_, pe1e2_;
  std::vector<double> a_;  // a_[n] = 2d * pe1_[n]
  std::unique_ptr<Dp> dp_;
};

struct OccupationEstimate {
  double mean = 0.0;
  double sem = 0.0;
  std::uint64_t reps = 0;
};

// Monte Carlo occupation time of dd over [0, t] for the two coupled
// chains: V (plain walk, rate 4dN^2) and W (difference chain: from
// x in dd, rate (4d-1)N^2, sign flip with probability 1/(4d-1), otherwise
// uniform over the 2d-1 nonzero neighbors).
OccupationEstimate simulate_v_occupation(int d, double stirring, double t,
                                         std::uint64_t reps,
                                         std::uint64_t seed, int threads);
OccupationEstimate simulate_w_occupation(int d, double stirring, double t,
                                         std::uint64_t reps,
                                         std::uint64_t seed, int threads);

// One W-chain jump; exposed so tests can drive the kernel directly.
Point w_chain_jump(const Point& x, int d, Rng& rng);
// Total jump rate of the W chain at x (N^2-scaled).
double w_chain_rate(const Point& x, int d, double stirring);

}  // namespace stirlab

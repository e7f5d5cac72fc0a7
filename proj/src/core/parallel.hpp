#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace stirlab {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs `body(replicate_index, chunk_result)` for every replicate in
// [0, reps), split into fixed-size chunks. Chunk boundaries depend only on
// `reps`, never on the thread count, and chunk results are merged in index
// order, so any floating-point accumulation is bit-identical for any
// number of threads.
template <class Result, class Body>
Result run_replicates(std::uint64_t reps, int threads, Body&& body,
                      std::uint64_t chunk_size = 1024) {
  if (reps == 0) return Result{};
  const std::uint64_t n_chunks = (reps + chunk_size - 1) / chunk_size;
  std::vector<Result> partial(n_chunks);
  std::atomic<std::uint64_t> next_chunk{0};

  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next_chunk.fetch_add(1);
      if (c >= n_chunks) return;
      const std::uint64_t lo = c * chunk_size;
      const std::uint64_t hi = std::min(reps, lo + chunk_size);
      Result& acc = partial[c];
      for (std::uint64_t r = lo; r < hi; ++r) body(r, acc);
    }
  };

  const int t = static_cast<int>(
      std::min<std::uint64_t>(resolve_threads(threads), n_chunks));
  if (t <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Result total{};
  for (auto& p : partial) total.merge(p);
  return total;
}

// Streaming mean/stderr accumulator (plain sums; merged in chunk order).
struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  void merge(const MeanAccumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    n += o.n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double variance() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double v = (sum_sq - static_cast<double>(n) * m * m) /
                     static_cast<double>(n - 1);
    return v > 0.0 ? v : 0.0;
  }
  double sem() const {
    return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

struct CountAccumulator {
  std::uint64_t hits = 0;
  std::uint64_t n = 0;

  void add(bool hit) {
    hits += hit ? 1 : 0;
    ++n;
  }
  void merge(const CountAccumulator& o) {
    hits += o.hits;
    n += o.n;
  }
  double mean() const { return n ? static_cast<double>(hits) / n : 0.0; }
  double sem() const {
    if (n == 0) return 0.0;
    const double p = mean();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  }
};

}  // namespace stirlab

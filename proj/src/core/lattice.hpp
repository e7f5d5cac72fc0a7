#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace stirlab {

// Lattice sites live in Z^d for 1 <= d <= kMaxDim. Coordinates beyond the
// active dimension are kept at zero so that equality and hashing can look
// at the whole array unconditionally.
inline constexpr int kMaxDim = 8;

struct Point {
  std::array<std::int32_t, kMaxDim> c{};

  friend bool operator==(const Point& a, const Point& b) { return a.c == b.c; }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
};

inline Point origin() { return Point{}; }

inline Point unit(int axis, std::int32_t sign = 1) {
  Point p;
  p.c[static_cast<std::size_t>(axis)] = sign;
  return p;
}

inline std::int64_t l1_norm(const Point& p, int d) {
  std::int64_t s = 0;
  for (int i = 0; i < d; ++i) s += std::abs(static_cast<std::int64_t>(p.c[i]));
  return s;
}

inline bool in_neighborhood(const Point& p, int d) { return l1_norm(p, d) == 1; }

inline void check_dimension(int d) {
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("dimension must be in [1, " +
                                std::to_string(kMaxDim) + "]");
}

// The 2d sites at L1 distance 1 from x. Order: +e_0, -e_0, +e_1, ...
inline std::vector<Point> neighbors(const Point& x, int d) {
  check_dimension(d);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(2 * d));
  for (int i = 0; i < d; ++i) {
    Point p = x;
    p.c[i] += 1;
    out.push_back(p);
    p.c[i] -= 2;
    out.push_back(p);
  }
  return out;
}

// Direction k in [0, 2d): axis k/2, sign +1 for even k. Matches the order
// of neighbors() so uniform direction picks agree everywhere.
inline Point step(const Point& x, int direction) {
  Point p = x;
  p.c[direction >> 1] += (direction & 1) ? -1 : 1;
  return p;
}

// All-coordinate avalanche hash; mixing every coordinate through the
// 64-bit finalizer avoids clustering when occupied sites line up along an
// axis.
struct PointHash {
  std::uint64_t operator()(const Point& p) const {
    std::uint64_t h = 0x2545f4914f6cdd1dULL;
    for (int i = 0; i < kMaxDim; i += 2) {
      const std::uint64_t packed =
          (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.c[i])) << 32) |
          static_cast<std::uint32_t>(p.c[i + 1]);
      h = avalanche64(h ^ packed);
    }
    return h;
  }
};

namespace detail {

// Open-addressing site -> dense-index map (linear probing, backward-shift
// deletion, max load 1/2). Keys are full Points; kEmpty marks free slots.
class SiteIndexMap {
 public:
  static constexpr std::uint32_t kNotFound = 0xffffffffu;

  SiteIndexMap() { rehash(64); }

  std::uint32_t find(const Point& key) const {
    std::size_t i = PointHash{}(key) & mask_;
    for (;;) {
      const Slot& s = slots_[i];
      if (s.index == kNotFound) return kNotFound;
      if (s.key == key) return s.index;
      i = (i + 1) & mask_;
    }
  }

  void insert(const Point& key, std::uint32_t index) {
    if ((size_ + 1) * 2 > slots_.size()) rehash(slots_.size() * 2);
    std::size_t i = PointHash{}(key) & mask_;
    while (slots_[i].index != kNotFound) i = (i + 1) & mask_;
    slots_[i] = Slot{key, index};
    ++size_;
  }

  void update(const Point& key, std::uint32_t index) {
    std::size_t i = PointHash{}(key) & mask_;
    while (!(slots_[i].key == key) || slots_[i].index == kNotFound)
      i = (i + 1) & mask_;
    slots_[i].index = index;
  }

  void erase(const Point& key) {
    std::size_t i = PointHash{}(key) & mask_;
    while (slots_[i].index == kNotFound || !(slots_[i].key == key))
      i = (i + 1) & mask_;
    // Backward-shift deletion keeps probe chains intact without tombstones:
    // walk the cluster after the hole and pull back any entry whose home
    // position does not lie strictly between the hole and its slot.
    std::size_t hole = i;
    std::size_t j = i;
    for (;;) {
      j = (j + 1) & mask_;
      if (slots_[j].index == kNotFound) break;
      const std::size_t home = PointHash{}(slots_[j].key) & mask_;
      if (((j - home) & mask_) >= ((j - hole) & mask_)) {
        slots_[hole] = slots_[j];
        hole = j;
      }
    }
    slots_[hole] = Slot{};
    --size_;
  }

  std::size_t size() const { return size_; }

 private:
  struct Slot {
    Point key{};
    std::uint32_t index = kNotFound;
  };

  void rehash(std::size_t cap) {
    std::vector<Slot> old = std::move(slots_);
    slots_.assign(cap, Slot{});
    mask_ = cap - 1;
    size_ = 0;
    for (const Slot& s : old)
      if (s.index != kNotFound) insert(s.key, s.index);
  }

  std::vector<Slot> slots_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

}  // namespace detail

enum class MoveKind { death, birth, jump };

struct Move {
  MoveKind kind;
  Point from;
  Point to;  // ignored for deaths
};

// Sparse occupancy set over the infinite lattice with O(1) uniform site
// access (dense index array + swap-remove) and incremental bookkeeping of
// the ordered occupied-neighbor pair count.
class Configuration {
 public:
  explicit Configuration(int dim) : dim_(dim) { check_dimension(dim); }

  int dim() const { return dim_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  std::int64_t ordered_pair_count() const { return pair_count_; }
  const Point& site(std::size_t i) const { return sites_[i]; }
  bool occupied(const Point& p) const {
    return map_.find(p) != detail::SiteIndexMap::kNotFound;
  }

  void insert(const Point& p) {
    if (occupied(p)) throw std::logic_error("insert: site already occupied");
    map_.insert(p, static_cast<std::uint32_t>(sites_.size()));
    sites_.push_back(p);
    pair_count_ += 2 * occupied_neighbor_count(p);
  }

  void erase(const Point& p) {
    const std::uint32_t idx = map_.find(p);
    if (idx == detail::SiteIndexMap::kNotFound)
      throw std::logic_error("erase: site not occupied");
    pair_count_ -= 2 * occupied_neighbor_count(p);
    const std::uint32_t last = static_cast<std::uint32_t>(sites_.size() - 1);
    if (idx != last) {
      sites_[idx] = sites_[last];
      map_.update(sites_[idx], idx);
    }
    sites_.pop_back();
    map_.erase(p);
  }

  // Death removes x. Returns true (state changed).
  bool apply_death(const Point& x) {
    require_occupied(x, "death");
    erase(x);
    return true;
  }

  // Birth from x onto neighbor y; suppressed (no change) if y is occupied.
  bool apply_birth(const Point& x, const Point& y) {
    require_occupied(x, "birth");
    require_adjacent(x, y);
    if (occupied(y)) return false;
    insert(y);
    return true;
  }

  // Stirring move of the particle at x to neighbor y; if y is occupied the
  // exchange swaps two particles and the occupancy set is unchanged.
  bool apply_jump(const Point& x, const Point& y) {
    require_occupied(x, "jump");
    require_adjacent(x, y);
    if (occupied(y)) return false;
    erase(x);
    insert(y);
    return true;
  }

  bool apply_move(const Move& m) {
    switch (m.kind) {
      case MoveKind::death:
        return apply_death(m.from);
      case MoveKind::birth:
        return apply_birth(m.from, m.to);
      case MoveKind::jump:
        return apply_jump(m.from, m.to);
    }
    throw std::logic_error("apply_move: bad kind");
  }

  // O(size * d) audit used by tests and checkpoint recounts.
  std::int64_t recount_pairs() const {
    std::int64_t total = 0;
    for (const Point& p : sites_) total += occupied_neighbor_count(p);
    return total;  // each unordered pair visited twice -> ordered count
  }

  int occupied_neighbor_count(const Point& p) const {
    int n = 0;
    for (int k = 0; k < 2 * dim_; ++k)
      if (occupied(step(p, k))) ++n;
    return n;
  }

 private:
  void require_occupied(const Point& x, const char* op) const {
    if (!occupied(x))
      throw std::logic_error(std::string(op) + ": source site not occupied");
  }
  void require_adjacent(const Point& x, const Point& y) const {
    Point diff;
    for (int i = 0; i < dim_; ++i) diff.c[i] = y.c[i] - x.c[i];
    if (!in_neighborhood(diff, dim_))
      throw std::invalid_argument("target site is not a lattice neighbor");
  }

  int dim_;
  std::vector<Point> sites_;
  detail::SiteIndexMap map_;
  std::int64_t pair_count_ = 0;
};

}  // namespace stirlab

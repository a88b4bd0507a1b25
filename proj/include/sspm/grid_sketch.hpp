#pragma once

// Count-Min and CountSketch: linear turnstile sketches used as baselines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sspm/errors.hpp"
#include "sspm/random.hpp"
#include "sspm/stream.hpp"

namespace sspm {

enum class GridKind { CountMin, CountSketch };

/// Multiply-add-shift hash on 64-bit keys, h(x) = ((a*x + b) mod 2^128) >> 64,
/// with a, b drawn from the full 128-bit range. Pairwise independent.
class MultiplyShiftHash {
public:
  MultiplyShiftHash() = default;
  MultiplyShiftHash(std::uint64_t seed, std::uint64_t row) {
    const auto s = derive_seed(seed, row);
    a_ = (static_cast<u128>(splitmix64(s)) << 64) | splitmix64(s + 1);
    b_ = (static_cast<u128>(splitmix64(s + 2)) << 64) | splitmix64(s + 3);
  }

  std::uint64_t operator()(std::uint64_t x) const noexcept {
    return static_cast<std::uint64_t>((a_ * x + b_) >> 64);
  }

  /// Maps into [0, range) by multiply-high.
  std::uint64_t bucket(std::uint64_t x, std::uint64_t range) const noexcept {
    return static_cast<std::uint64_t>((static_cast<u128>((*this)(x)) * range) >> 64);
  }

  friend bool operator==(const MultiplyShiftHash&, const MultiplyShiftHash&) = default;

private:
  using u128 = unsigned __int128;
  u128 a_ = 0;
  u128 b_ = 0;
};

/// Depth ceil(ln |U|) (failure probability 1/|U| per query), at least 1.
inline std::size_t grid_depth(std::uint64_t universe_size) {
  if (universe_size <= 1) return 1;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(universe_size)))));
}

/// d x w array of signed counters.
///
/// Count-Min adds +-1 to one cell per row and answers with the row minimum;
/// CountSketch adds sign_i(x) * (+-1) and answers with the median of the
/// signed cells (mean of the two middle values for even depth).
class GridSketch {
public:
  GridSketch(GridKind kind, std::size_t total_counters, std::uint64_t universe_size, std::uint64_t seed)
      : kind_(kind), depth_(grid_depth(universe_size)), width_(total_counters / depth_), seed_(seed) {
    if (width_ < 1)
      throw BudgetTooSmall("grid sketch needs at least " + std::to_string(depth_) +
                           " counters, got " + std::to_string(total_counters));
    cells_.assign(depth_ * width_, 0);
    rows_.reserve(depth_);
    sign_keys_.reserve(kind == GridKind::CountSketch ? depth_ : 0);
    for (std::size_t r = 0; r < depth_; ++r) {
      rows_.emplace_back(derive_seed(seed, seed_domain::kGridRow), r);
      if (kind == GridKind::CountSketch) sign_keys_.push_back(derive_seed(derive_seed(seed, seed_domain::kGridSign), r));
    }
  }

  void update(const StreamOp& op) {
    const std::int64_t delta = op.is_insert() ? 1 : -1;
    for (std::size_t r = 0; r < depth_; ++r) cells_[r * width_ + column(r, op.item)] += delta * sign(r, op.item);
  }

  double query(ItemId item) const {
    if (kind_ == GridKind::CountMin) {
      std::int64_t best = cell(0, item);
      for (std::size_t r = 1; r < depth_; ++r) best = std::min(best, cell(r, item));
      return static_cast<double>(best);
    }
    std::vector<std::int64_t> est(depth_);
    for (std::size_t r = 0; r < depth_; ++r) est[r] = sign(r, item) * cell(r, item);
    const auto mid = est.begin() + static_cast<std::ptrdiff_t>(depth_ / 2);
    std::nth_element(est.begin(), mid, est.end());
    if (depth_ % 2 == 1) return static_cast<double>(*mid);
    const auto lower = *std::max_element(est.begin(), mid);
    return (static_cast<double>(lower) + static_cast<double>(*mid)) / 2.0;
  }

  std::size_t column(std::size_t row, ItemId item) const { return rows_[row].bucket(item, width_); }

  /// +1 or -1 for CountSketch, always +1 for Count-Min.
  /// Signs come from a full mixer rather than multiply-shift: pairwise
  /// independence keeps each row unbiased but skews collision noise enough
  /// to bias the median.
  std::int64_t sign(std::size_t row, ItemId item) const {
    if (kind_ == GridKind::CountMin) return 1;
    return (splitmix64(sign_keys_[row] ^ item) >> 63) ? 1 : -1;
  }

  std::span<const std::int64_t> row(std::size_t r) const {
    return std::span<const std::int64_t>(cells_).subspan(r * width_, width_);
  }
  std::span<const std::int64_t> cells() const noexcept { return cells_; }

  GridKind kind() const noexcept { return kind_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t width() const noexcept { return width_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t field_count() const noexcept { return depth_ * width_; }

  /// Cell-wise sum with a sketch of identical kind, shape and seed.
  GridSketch& operator+=(const GridSketch& other) {
    if (kind_ != other.kind_ || depth_ != other.depth_ || width_ != other.width_ || seed_ != other.seed_)
      throw CapacityMismatch("grid sketches differ in kind, shape or seed");
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
    return *this;
  }

  friend bool operator==(const GridSketch& a, const GridSketch& b) {
    return a.kind_ == b.kind_ && a.depth_ == b.depth_ && a.width_ == b.width_ && a.seed_ == b.seed_ &&
           a.cells_ == b.cells_;
  }

private:
  std::int64_t cell(std::size_t r, ItemId item) const { return cells_[r * width_ + column(r, item)]; }

  GridKind kind_;
  std::size_t depth_;
  std::size_t width_;
  std::uint64_t seed_;
  std::vector<std::int64_t> cells_;
  std::vector<MultiplyShiftHash> rows_;
  std::vector<std::uint64_t> sign_keys_;
};

} // namespace sspm

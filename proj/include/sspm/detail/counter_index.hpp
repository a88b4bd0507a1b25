#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "sspm/stream.hpp"

namespace sspm::detail {

struct NoPayload {
  friend bool operator==(NoPayload, NoPayload) = default;
};

/// Fixed-capacity item -> count table with an ordered index on
/// (count, sequence number) giving O(log m) access to the minimum entry.
///
/// Slots live in a contiguous vector so full scans are cheap; an evicted slot
/// is reused in place by the entering item. Each entry carries the sequence
/// number it was assigned when it entered, which breaks count ties in favour
/// of the oldest entry.
template <class Count, class Payload = NoPayload>
class CounterIndex {
public:
  struct Slot {
    ItemId item;
    Count count;
    std::uint64_t seq;
    [[no_unique_address]] Payload extra;
  };

  explicit CounterIndex(std::size_t capacity) : capacity_(capacity) {
    slots_.reserve(capacity);
    where_.reserve(capacity);
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return slots_.size(); }
  bool empty() const noexcept { return slots_.empty(); }
  bool full() const noexcept { return slots_.size() >= capacity_; }
  std::uint64_t next_seq() const noexcept { return next_seq_; }

  /// Slot index of `item`, or npos.
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::size_t find(ItemId item) const {
    auto it = where_.find(item);
    return it == where_.end() ? npos : it->second;
  }

  const Slot& slot(std::size_t idx) const { return slots_[idx]; }
  Payload& payload(std::size_t idx) { return slots_[idx].extra; }
  const std::vector<Slot>& slots() const noexcept { return slots_; }

  /// Adds a new entry in a free slot with a fresh sequence number.
  std::size_t add(ItemId item, Count count, Payload extra = {}) {
    return add_with_seq(item, count, next_seq_, extra);
  }

  /// Adds an entry with an explicit sequence number (deserialization, merge).
  std::size_t add_with_seq(ItemId item, Count count, std::uint64_t seq, Payload extra = {}) {
    assert(!full() && find(item) == npos);
    const auto idx = slots_.size();
    slots_.push_back({item, count, seq, extra});
    where_.emplace(item, idx);
    order_.emplace(count, seq, idx);
    next_seq_ = std::max(next_seq_, seq + 1);
    return idx;
  }

  void set_count(std::size_t idx, Count count) {
    Slot& s = slots_[idx];
    if (s.count == count) return;
    auto node = order_.extract({s.count, s.seq, idx});
    s.count = count;
    node.value() = {count, s.seq, idx};
    order_.insert(std::move(node));
  }

  /// Index of the minimum-count entry (oldest on ties). Requires !empty().
  std::size_t min_slot() const { return std::get<2>(*order_.begin()); }
  Count min_count() const { return std::get<0>(*order_.begin()); }

  /// Evicts the item at `idx` and installs `item` there with a fresh sequence
  /// number.
  void replace(std::size_t idx, ItemId item, Count count, Payload extra = {}) {
    Slot& s = slots_[idx];
    auto node = order_.extract({s.count, s.seq, idx});
    where_.erase(s.item);
    s = {item, count, next_seq_++, extra};
    where_.emplace(item, idx);
    node.value() = {count, s.seq, idx};
    order_.insert(std::move(node));
  }

  /// Slots sorted by sequence number (entry order).
  std::vector<Slot> by_seq() const {
    std::vector<Slot> out(slots_);
    std::sort(out.begin(), out.end(), [](const Slot& a, const Slot& b) { return a.seq < b.seq; });
    return out;
  }

  void set_next_seq(std::uint64_t seq) { next_seq_ = std::max(next_seq_, seq); }

private:
  std::size_t capacity_;
  std::vector<Slot> slots_;
  std::unordered_map<ItemId, std::size_t> where_;
  std::set<std::tuple<Count, std::uint64_t, std::size_t>> order_;
  std::uint64_t next_seq_ = 0;
};

/// ceil(x) that ignores a relative excess of 1e-12 above an integer, so that
/// e.g. 2/0.01 sizes to 200 counters even if the quotient rounds upward.
inline std::size_t ceil_count(double x) {
  const double snapped = std::nearbyint(x);
  if (std::abs(x - snapped) <= 1e-12 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(snapped);
  return static_cast<std::size_t>(std::ceil(x));
}

inline void require_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw BadEpsilon(eps);
}

inline void require_alpha_finite(double alpha) {
  if (!(alpha >= 1.0) || std::isinf(alpha)) throw BadAlpha(alpha);
}

} // namespace sspm::detail

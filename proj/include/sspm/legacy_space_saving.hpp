#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sspm/detail/counter_index.hpp"
#include "sspm/stream.hpp"

namespace sspm {

/// The original single-count SpaceSaving± update: insertions as in
/// SpaceSaving, a deletion of a monitored item decrements its count, and a
/// deletion of an unmonitored item is ignored.
///
/// KNOWN INCORRECT UNDER INTERLEAVING. Its error guarantee only holds when
/// every deletion follows every insertion; once deletions can lower the
/// minimum count mid-stream, a frequent item can be evicted cheaply and lost.
/// It exists to reproduce that failure (see gen_adversarial); use
/// IntegratedSummary or DoubleSummary for real bounded-deletion streams.
class LegacySpaceSavingPM {
public:
  explicit LegacySpaceSavingPM(std::size_t capacity) : index_(checked(capacity)) {}

  void update(const StreamOp& op) {
    const auto idx = index_.find(op.item);
    if (!op.is_insert()) {
      if (idx != Index::npos) index_.set_count(idx, index_.slot(idx).count - 1);
      return;
    }
    if (idx != Index::npos) {
      index_.set_count(idx, index_.slot(idx).count + 1);
    } else if (!index_.full()) {
      index_.add(op.item, 1);
    } else {
      const auto victim = index_.min_slot();
      index_.replace(victim, op.item, index_.slot(victim).count + 1);
    }
  }

  /// Signed: interleaved deletions can drive a count below zero.
  std::int64_t query(ItemId item) const {
    const auto idx = index_.find(item);
    return idx == Index::npos ? 0 : index_.slot(idx).count;
  }

  std::size_t capacity() const noexcept { return index_.capacity(); }
  std::size_t size() const noexcept { return index_.size(); }
  bool contains(ItemId item) const { return index_.find(item) != Index::npos; }
  std::int64_t min_count() const { return index_.empty() ? 0 : index_.min_count(); }

  std::vector<ItemId> monitored() const {
    std::vector<ItemId> out;
    for (const auto& s : index_.slots()) out.push_back(s.item);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Two fields (item, count) per entry.
  std::size_t field_count() const noexcept { return 2 * capacity(); }

private:
  using Index = detail::CounterIndex<std::int64_t>;

  static std::size_t checked(std::size_t capacity) {
    if (capacity == 0) throw ZeroCapacity();
    return capacity;
  }

  Index index_;
};

} // namespace sspm

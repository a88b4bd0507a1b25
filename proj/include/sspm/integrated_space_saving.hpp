#pragma once

// Integrated SpaceSaving±: a single summary holding separate insert and delete
// counts per monitored item.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sspm/detail/counter_index.hpp"
#include "sspm/detail/record.hpp"
#include "sspm/stream.hpp"

namespace sspm {

/// m = ceil(alpha / eps).
inline std::size_t integrated_capacity(double eps, double alpha) {
  detail::require_epsilon(eps);
  detail::require_alpha_finite(alpha);
  return detail::ceil_count(alpha / eps);
}

/// Bounded-deletion summary with (insert_count, delete_count) per entry.
///
/// Eviction is driven by insert counts alone, so the minimum insert count
/// never decreases; it bounds every item's estimation error. Deletions of
/// unmonitored items are dropped once the summary is full.
class IntegratedSummary {
public:
  struct Entry {
    ItemId item;
    std::uint64_t insert_count;
    std::uint64_t delete_count;
    std::uint64_t seq;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  explicit IntegratedSummary(std::size_t capacity) : index_(checked(capacity)) {}

  static IntegratedSummary for_error(double eps, double alpha) {
    return IntegratedSummary(integrated_capacity(eps, alpha));
  }

  /// Rebuilds a summary from entries in entry order plus the stream tallies.
  static IntegratedSummary from_entries(std::size_t capacity, std::span<const Entry> entries,
                                        std::uint64_t inserts_seen, std::uint64_t deletes_seen,
                                        std::uint64_t next_seq = 0) {
    IntegratedSummary s(capacity);
    if (entries.size() > capacity) throw FormatError("more entries than capacity");
    std::unordered_set<std::uint64_t> seqs;
    for (const auto& e : entries) {
      if (s.index_.find(e.item) != Index::npos) throw FormatError("duplicate item in summary");
      if (!seqs.insert(e.seq).second) throw FormatError("duplicate sequence number in summary");
      s.index_.add_with_seq(e.item, e.insert_count, e.seq, e.delete_count);
    }
    s.index_.set_next_seq(next_seq);
    s.inserts_seen_ = inserts_seen;
    s.deletes_seen_ = deletes_seen;
    return s;
  }

  void update(const StreamOp& op) {
    if (op.is_insert())
      ++inserts_seen_;
    else
      ++deletes_seen_;

    if (const auto idx = index_.find(op.item); idx != Index::npos) {
      if (op.is_insert())
        index_.set_count(idx, index_.slot(idx).count + 1);
      else
        ++index_.payload(idx);
    } else if (!index_.full()) {
      // A stream with nonnegative frequencies cannot delete an item that was
      // never evicted, so a miss on a non-full summary is always an insertion.
      index_.add(op.item, 1, 0);
    } else if (op.is_insert()) {
      const auto victim = index_.min_slot();
      index_.replace(victim, op.item, index_.slot(victim).count + 1, 0);
    }
  }

  /// insert_count - delete_count if monitored, else 0. Nonnegative on
  /// validated streams.
  std::int64_t query(ItemId item) const {
    const auto idx = index_.find(item);
    if (idx == Index::npos) return 0;
    const auto& s = index_.slot(idx);
    return static_cast<std::int64_t>(s.count) - static_cast<std::int64_t>(s.extra);
  }

  /// Monitored items whose estimate reaches eps * (I - D), ascending by id.
  std::vector<ItemId> heavy_hitters(double eps) const {
    const double threshold = eps * static_cast<double>(f1());
    std::vector<ItemId> out;
    for (const auto& s : index_.slots())
      if (static_cast<double>(static_cast<std::int64_t>(s.count) - static_cast<std::int64_t>(s.extra)) >= threshold)
        out.push_back(s.item);
    std::sort(out.begin(), out.end());
    return out;
  }

  bool contains(ItemId item) const { return index_.find(item) != Index::npos; }
  std::size_t capacity() const noexcept { return index_.capacity(); }
  std::size_t size() const noexcept { return index_.size(); }
  bool full() const noexcept { return index_.full(); }
  bool empty() const noexcept { return index_.empty(); }
  std::uint64_t inserts_seen() const noexcept { return inserts_seen_; }
  std::uint64_t deletes_seen() const noexcept { return deletes_seen_; }
  std::uint64_t f1() const noexcept { return inserts_seen_ - deletes_seen_; }

  /// Smallest monitored insert count; 0 for an empty summary.
  std::uint64_t min_insert_count() const { return index_.empty() ? 0 : index_.min_count(); }

  std::uint64_t insert_count_sum() const {
    std::uint64_t s = 0;
    for (const auto& slot : index_.slots()) s += slot.count;
    return s;
  }

  /// Three fields (item, insert_count, delete_count) per entry.
  std::size_t field_count() const noexcept { return 3 * capacity(); }

  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    out.reserve(index_.size());
    for (const auto& s : index_.by_seq()) out.push_back({s.item, s.count, s.extra, s.seq});
    return out;
  }

  /// Unordered view of the entries; cheaper than entries() for full scans.
  template <class Fn>
  void for_each_entry(Fn&& fn) const {
    for (const auto& s : index_.slots()) fn(s.item, s.count, s.extra);
  }

  std::string serialize() const {
    std::ostringstream os;
    os << "sspm-integrated-summary v1\n"
       << "capacity " << capacity() << "\ninserts " << inserts_seen_ << "\ndeletes "
       << deletes_seen_ << "\nnext_seq " << index_.next_seq() << "\nentries " << size() << '\n';
    for (const auto& e : entries())
      os << e.item << ' ' << e.insert_count << ' ' << e.delete_count << ' ' << e.seq << '\n';
    return os.str();
  }

  static IntegratedSummary deserialize(std::string_view text) {
    detail::RecordReader r(text);
    r.expect("sspm-integrated-summary");
    r.expect("v1");
    r.expect("capacity");
    const auto capacity = r.u64();
    r.expect("inserts");
    const auto inserts = r.u64();
    r.expect("deletes");
    const auto deletes = r.u64();
    r.expect("next_seq");
    const auto next_seq = r.u64();
    r.expect("entries");
    const auto n = r.u64();
    if (capacity == 0) throw FormatError("zero capacity in summary record");
    if (n > capacity) throw FormatError("more entries than capacity");
    if (deletes > inserts) throw FormatError("more deletions than insertions in summary record");
    std::vector<Entry> entries;
    entries.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      Entry e{};
      e.item = r.u64();
      e.insert_count = r.u64();
      e.delete_count = r.u64();
      e.seq = r.u64();
      if (e.seq >= next_seq) throw FormatError("entry sequence number beyond next_seq");
      entries.push_back(e);
    }
    r.expect_end();
    return from_entries(capacity, entries, inserts, deletes, next_seq);
  }

  friend bool operator==(const IntegratedSummary& a, const IntegratedSummary& b) {
    if (a.capacity() != b.capacity() || a.inserts_seen_ != b.inserts_seen_ ||
        a.deletes_seen_ != b.deletes_seen_ || a.size() != b.size())
      return false;
    const auto ea = a.entries();
    const auto eb = b.entries();
    return std::equal(ea.begin(), ea.end(), eb.begin(), [](const Entry& x, const Entry& y) {
      return x.item == y.item && x.insert_count == y.insert_count && x.delete_count == y.delete_count;
    });
  }

private:
  using Index = detail::CounterIndex<std::uint64_t, std::uint64_t>;

  static std::size_t checked(std::size_t capacity) {
    if (capacity == 0) throw ZeroCapacity();
    return capacity;
  }

  Index index_;
  std::uint64_t inserts_seen_ = 0;
  std::uint64_t deletes_seen_ = 0;
};

/// Union (insert and delete counts of shared items added), then keep the
/// `capacity` entries with the largest insert counts. Ties keep the earlier
/// entry in union order: entries of `a` oldest first, then entries only in `b`.
inline IntegratedSummary merge(const IntegratedSummary& a, const IntegratedSummary& b) {
  if (a.capacity() != b.capacity())
    throw CapacityMismatch("cannot merge summaries of capacity " + std::to_string(a.capacity()) +
                           " and " + std::to_string(b.capacity()));
  std::vector<IntegratedSummary::Entry> united = a.entries();
  std::unordered_map<ItemId, std::size_t> pos;
  for (std::size_t i = 0; i < united.size(); ++i) pos.emplace(united[i].item, i);
  for (const auto& e : b.entries()) {
    if (auto it = pos.find(e.item); it != pos.end()) {
      united[it->second].insert_count += e.insert_count;
      united[it->second].delete_count += e.delete_count;
    } else {
      pos.emplace(e.item, united.size());
      united.push_back(e);
    }
  }
  std::vector<std::size_t> rank(united.size());
  std::iota(rank.begin(), rank.end(), 0);
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t x, std::size_t y) {
    return united[x].insert_count > united[y].insert_count;
  });
  if (rank.size() > a.capacity()) rank.resize(a.capacity());
  std::sort(rank.begin(), rank.end());

  std::vector<IntegratedSummary::Entry> kept;
  kept.reserve(rank.size());
  for (std::size_t i = 0; i < rank.size(); ++i) {
    auto e = united[rank[i]];
    e.seq = i;
    kept.push_back(e);
  }
  return IntegratedSummary::from_entries(a.capacity(), kept, a.inserts_seen() + b.inserts_seen(),
                                         a.deletes_seen() + b.deletes_seen(), kept.size());
}

} // namespace sspm

#pragma once

// Insertion-only SpaceSaving and its unbiased variant.

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
#include "sspm/random.hpp"
#include "sspm/stream.hpp"

namespace sspm {

/// SpaceSaving summary over an insertion-only stream: at most `capacity`
/// monitored items, each with a single overestimating count.
///
/// When full, an unmonitored arrival evicts the minimum-count entry (oldest
/// entry on ties) and inherits its count plus one. Built purely from
/// insertions, the counts sum to processed() and the minimum count is at most
/// processed()/capacity().
class CounterSummary {
public:
  struct Entry {
    ItemId item;
    std::uint64_t count;
    std::uint64_t seq;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  explicit CounterSummary(std::size_t capacity) : index_(checked(capacity)) {}

  /// Summary with ceil(1/eps) counters.
  static CounterSummary for_epsilon(double eps) {
    detail::require_epsilon(eps);
    return CounterSummary(detail::ceil_count(1.0 / eps));
  }

  /// Rebuilds a summary from explicit entries given in entry (sequence) order.
  static CounterSummary from_entries(std::size_t capacity, std::span<const Entry> entries,
                                     std::uint64_t processed, std::uint64_t next_seq = 0) {
    CounterSummary s(capacity);
    if (entries.size() > capacity) throw FormatError("more entries than capacity");
    std::unordered_set<std::uint64_t> seqs;
    for (const auto& e : entries) {
      if (s.index_.find(e.item) != Index::npos) throw FormatError("duplicate item in summary");
      if (!seqs.insert(e.seq).second) throw FormatError("duplicate sequence number in summary");
      s.index_.add_with_seq(e.item, e.count, e.seq);
    }
    s.index_.set_next_seq(next_seq);
    s.processed_ = processed;
    return s;
  }

  /// Algorithm-1 update.
  void insert(ItemId item) {
    ++processed_;
    if (const auto idx = index_.find(item); idx != Index::npos) {
      index_.set_count(idx, index_.slot(idx).count + 1);
    } else if (!index_.full()) {
      index_.add(item, 1);
    } else {
      const auto victim = index_.min_slot();
      index_.replace(victim, item, index_.slot(victim).count + 1);
    }
  }

  /// Unbiased update: identical to insert() except that a full-summary miss
  /// takes over the minimum entry only with probability 1/(w+1); otherwise the
  /// minimum entry keeps its identity and its count still becomes w+1.
  template <class Rng>
  void insert_unbiased(ItemId item, Rng& rng) {
    if (index_.find(item) != Index::npos || !index_.full()) {
      insert(item);
      return;
    }
    ++processed_;
    const auto victim = index_.min_slot();
    const std::uint64_t w = index_.slot(victim).count;
    if (draw_below(rng, w + 1) == 0)
      index_.replace(victim, item, w + 1);
    else
      index_.set_count(victim, w + 1);
  }

  /// count if monitored, else 0.
  std::uint64_t query(ItemId item) const {
    const auto idx = index_.find(item);
    return idx == Index::npos ? 0 : index_.slot(idx).count;
  }

  bool contains(ItemId item) const { return index_.find(item) != Index::npos; }
  std::size_t capacity() const noexcept { return index_.capacity(); }
  std::size_t size() const noexcept { return index_.size(); }
  bool full() const noexcept { return index_.full(); }
  bool empty() const noexcept { return index_.empty(); }
  std::uint64_t processed() const noexcept { return processed_; }

  /// Smallest monitored count; 0 for an empty summary.
  std::uint64_t min_count() const { return index_.empty() ? 0 : index_.min_count(); }

  std::uint64_t count_sum() const {
    std::uint64_t s = 0;
    for (const auto& slot : index_.slots()) s += slot.count;
    return s;
  }

  /// Entries in the order they entered the summary.
  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    out.reserve(index_.size());
    for (const auto& s : index_.by_seq()) out.push_back({s.item, s.count, s.seq});
    return out;
  }

  /// Monitored items, ascending by id.
  std::vector<ItemId> monitored() const {
    std::vector<ItemId> out;
    out.reserve(index_.size());
    for (const auto& s : index_.slots()) out.push_back(s.item);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string serialize() const {
    std::ostringstream os;
    os << "sspm-counter-summary v1\n"
       << "capacity " << capacity() << "\nprocessed " << processed_ << "\nnext_seq "
       << index_.next_seq() << "\nentries " << size() << '\n';
    for (const auto& e : entries()) os << e.item << ' ' << e.count << ' ' << e.seq << '\n';
    return os.str();
  }

  static CounterSummary deserialize(std::string_view text) {
    detail::RecordReader r(text);
    r.expect("sspm-counter-summary");
    r.expect("v1");
    r.expect("capacity");
    const auto capacity = r.u64();
    r.expect("processed");
    const auto processed = r.u64();
    r.expect("next_seq");
    const auto next_seq = r.u64();
    r.expect("entries");
    const auto n = r.u64();
    if (capacity == 0) throw FormatError("zero capacity in summary record");
    if (n > capacity) throw FormatError("more entries than capacity");
    std::vector<Entry> entries;
    entries.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      Entry e{};
      e.item = r.u64();
      e.count = r.u64();
      e.seq = r.u64();
      if (e.seq >= next_seq) throw FormatError("entry sequence number beyond next_seq");
      entries.push_back(e);
    }
    r.expect_end();
    return from_entries(capacity, entries, processed, next_seq);
  }

  /// Same capacity, processed count and (item, count) entries in entry order.
  friend bool operator==(const CounterSummary& a, const CounterSummary& b) {
    if (a.capacity() != b.capacity() || a.processed_ != b.processed_ || a.size() != b.size())
      return false;
    const auto ea = a.entries();
    const auto eb = b.entries();
    return std::equal(ea.begin(), ea.end(), eb.begin(), [](const Entry& x, const Entry& y) {
      return x.item == y.item && x.count == y.count;
    });
  }

private:
  using Index = detail::CounterIndex<std::uint64_t>;

  static std::size_t checked(std::size_t capacity) {
    if (capacity == 0) throw ZeroCapacity();
    return capacity;
  }

  Index index_;
  std::uint64_t processed_ = 0;
};

/// Union of both summaries (counts of shared items added), truncated to the
/// `capacity` largest counts. Count ties keep the entry that comes first in
/// the union order: entries of `a` by age, then entries only in `b` by age.
inline CounterSummary merge(const CounterSummary& a, const CounterSummary& b) {
  if (a.capacity() != b.capacity())
    throw CapacityMismatch("cannot merge summaries of capacity " + std::to_string(a.capacity()) +
                           " and " + std::to_string(b.capacity()));
  std::vector<CounterSummary::Entry> united = a.entries();
  std::unordered_map<ItemId, std::size_t> pos;
  for (std::size_t i = 0; i < united.size(); ++i) pos.emplace(united[i].item, i);
  for (const auto& e : b.entries()) {
    if (auto it = pos.find(e.item); it != pos.end()) {
      united[it->second].count += e.count;
    } else {
      pos.emplace(e.item, united.size());
      united.push_back(e);
    }
  }
  std::vector<std::size_t> rank(united.size());
  std::iota(rank.begin(), rank.end(), 0);
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t x, std::size_t y) {
    return united[x].count > united[y].count;
  });
  if (rank.size() > a.capacity()) rank.resize(a.capacity());
  std::sort(rank.begin(), rank.end());

  std::vector<CounterSummary::Entry> kept;
  kept.reserve(rank.size());
  for (std::size_t i = 0; i < rank.size(); ++i) kept.push_back({united[rank[i]].item, united[rank[i]].count, i});
  return CounterSummary::from_entries(a.capacity(), kept, a.processed() + b.processed(), kept.size());
}

} // namespace sspm

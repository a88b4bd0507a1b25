#pragma once

// Double SpaceSaving± and its unbiased variant: one SpaceSaving summary for
// insertions, an independent one for deletions.

#include <algorithm>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sspm/space_saving.hpp"

namespace sspm {

struct DoubleSizing {
  std::size_t insert_capacity;
  std::size_t delete_capacity;
  friend bool operator==(const DoubleSizing&, const DoubleSizing&) = default;
};

/// m_I = ceil(2 alpha / eps), m_D = max(1, ceil(2 (alpha - 1) / eps)).
inline DoubleSizing double_sizing(double eps, double alpha) {
  detail::require_epsilon(eps);
  detail::require_alpha_finite(alpha);
  return {detail::ceil_count(2.0 * alpha / eps),
          std::max<std::size_t>(1, detail::ceil_count(2.0 * (alpha - 1.0) / eps))};
}

class DoubleSummary {
public:
  DoubleSummary(DoubleSizing sizing, bool unbiased = false, std::uint64_t seed = 0)
      : inserts_(sizing.insert_capacity), deletes_(sizing.delete_capacity), unbiased_(unbiased),
        insert_rng_(derive_seed(seed, seed_domain::kInsertSide)),
        delete_rng_(derive_seed(seed, seed_domain::kDeleteSide)) {}

  /// Sized so that every estimate is within eps * F1 on alpha-bounded streams.
  static DoubleSummary for_error(double eps, double alpha, bool unbiased = false,
                                 std::uint64_t seed = 0) {
    return DoubleSummary(double_sizing(eps, alpha), unbiased, seed);
  }

  void update(const StreamOp& op) {
    CounterSummary& side = op.is_insert() ? inserts_ : deletes_;
    if (unbiased_)
      side.insert_unbiased(op.item, op.is_insert() ? insert_rng_ : delete_rng_);
    else
      side.insert(op.item);
  }

  /// max(insert estimate - delete estimate, 0).
  std::uint64_t query(ItemId item) const {
    const auto ins = inserts_.query(item);
    const auto del = deletes_.query(item);
    return ins > del ? ins - del : 0;
  }

  /// Unclipped difference; only meaningful (and only allowed) for the
  /// unbiased variant, where its expectation is the true frequency.
  std::int64_t query_raw(ItemId item) const {
    if (!unbiased_) throw NotUnbiasedSummary();
    return static_cast<std::int64_t>(inserts_.query(item)) -
           static_cast<std::int64_t>(deletes_.query(item));
  }

  /// Every item monitored by the insertion summary.
  std::vector<ItemId> heavy_hitters() const { return inserts_.monitored(); }

  const CounterSummary& insert_summary() const noexcept { return inserts_; }
  const CounterSummary& delete_summary() const noexcept { return deletes_; }
  bool unbiased() const noexcept { return unbiased_; }
  DoubleSizing sizing() const noexcept { return {inserts_.capacity(), deletes_.capacity()}; }

  /// Two fields (item, count) per entry across both summaries.
  std::size_t field_count() const noexcept { return 2 * (inserts_.capacity() + deletes_.capacity()); }

  std::string serialize() const {
    std::ostringstream os;
    os << "sspm-double-summary v1\nunbiased " << (unbiased_ ? 1 : 0) << '\n'
       << "insert_side\n" << inserts_.serialize() << "delete_side\n" << deletes_.serialize()
       << "rng\n" << insert_rng_ << '\n' << delete_rng_ << '\n';
    return os.str();
  }

  static DoubleSummary deserialize(std::string_view text) {
    const auto cut = [&](std::string_view from, std::string_view to) {
      const auto b = text.find(from);
      const auto e = text.find(to, b == std::string_view::npos ? 0 : b);
      if (b == std::string_view::npos || e == std::string_view::npos)
        throw FormatError("double summary record: missing section");
      return text.substr(b + from.size(), e - b - from.size());
    };
    detail::RecordReader head(text.substr(0, text.find("insert_side\n")));
    head.expect("sspm-double-summary");
    head.expect("v1");
    head.expect("unbiased");
    const auto flag = head.u64();
    if (flag > 1) throw FormatError("double summary record: bad unbiased flag");
    head.expect_end();

    DoubleSummary s({1, 1}, flag == 1);
    s.inserts_ = CounterSummary::deserialize(cut("insert_side\n", "delete_side\n"));
    s.deletes_ = CounterSummary::deserialize(cut("delete_side\n", "rng\n"));
    std::istringstream rng(std::string(text.substr(text.find("rng\n") + 4)));
    rng >> s.insert_rng_ >> s.delete_rng_;
    if (!rng) throw FormatError("double summary record: bad rng state");
    rng >> std::ws;
    if (!rng.eof()) throw FormatError("double summary record: trailing data");
    return s;
  }

  /// Compares summary contents; generator state is not part of equality.
  friend bool operator==(const DoubleSummary& a, const DoubleSummary& b) {
    return a.unbiased_ == b.unbiased_ && a.inserts_ == b.inserts_ && a.deletes_ == b.deletes_;
  }

  friend DoubleSummary merge(const DoubleSummary& a, const DoubleSummary& b) {
    if (a.sizing() != b.sizing() || a.unbiased_ != b.unbiased_)
      throw CapacityMismatch("double summaries differ in (m_I, m_D, unbiased)");
    DoubleSummary out = a;
    out.inserts_ = merge(a.inserts_, b.inserts_);
    out.deletes_ = merge(a.deletes_, b.deletes_);
    return out;
  }

private:
  CounterSummary inserts_;
  CounterSummary deletes_;
  bool unbiased_;
  std::mt19937_64 insert_rng_;
  std::mt19937_64 delete_rng_;
};

} // namespace sspm

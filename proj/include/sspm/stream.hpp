#pragma once

// Stream events, the bounded-deletion contract, and exact ground truth.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sspm/errors.hpp"

namespace sspm {

using ItemId = std::uint64_t;

enum class OpKind : std::uint8_t { Insertion, Deletion };

struct StreamOp {
  ItemId item = 0;
  OpKind op = OpKind::Insertion;

  bool is_insert() const noexcept { return op == OpKind::Insertion; }
  friend bool operator==(const StreamOp&, const StreamOp&) = default;
};

inline StreamOp insert_op(ItemId item) noexcept { return {item, OpKind::Insertion}; }
inline StreamOp delete_op(ItemId item) noexcept { return {item, OpKind::Deletion}; }

/// Exact aggregate counts of a stream.
struct StreamStats {
  std::uint64_t n_ops = 0;
  std::uint64_t inserts = 0;
  std::uint64_t deletes = 0;
  std::uint64_t f1 = 0;

  /// I / (I - D); +infinity when I == D (including the empty stream).
  double alpha_effective() const noexcept {
    if (inserts == deletes) return std::numeric_limits<double>::infinity();
    return static_cast<double>(inserts) / static_cast<double>(inserts - deletes);
  }

  friend bool operator==(const StreamStats&, const StreamStats&) = default;
};

/// item -> I(x) - D(x). Items whose net frequency returned to zero stay present.
using ExactTable = std::unordered_map<ItemId, std::uint64_t>;

inline std::uint64_t frequency_of(const ExactTable& table, ItemId item) {
  auto it = table.find(item);
  return it == table.end() ? 0 : it->second;
}

/// Whether a stream with these totals satisfies D <= (1 - 1/alpha) * I.
inline bool within_alpha(std::uint64_t inserts, std::uint64_t deletes, double alpha) {
  if (std::isinf(alpha)) return deletes <= inserts;
  // alpha*D <= (alpha-1)*I, evaluated in extended precision.
  const long double a = alpha;
  return a * static_cast<long double>(deletes) <=
         (a - 1.0L) * static_cast<long double>(inserts);
}

namespace detail {

inline void require_alpha(double alpha) {
  if (!(alpha >= 1.0)) throw BadAlpha(alpha);
}

// Running tally shared by validation and exact counting.
inline StreamStats tally(std::span<const StreamOp> stream, ExactTable& freq) {
  StreamStats stats;
  for (std::size_t pos = 0; pos < stream.size(); ++pos) {
    const StreamOp& op = stream[pos];
    if (op.is_insert()) {
      ++freq[op.item];
      ++stats.inserts;
    } else {
      auto it = freq.find(op.item);
      if (it == freq.end() || it->second == 0) throw NegativeFrequency(op.item, pos);
      --it->second;
      ++stats.deletes;
    }
  }
  stats.n_ops = stream.size();
  stats.f1 = stats.inserts - stats.deletes;
  return stats;
}

} // namespace detail

/// Checks nonnegativity at every prefix and the end-of-stream deletion budget.
/// Throws NegativeFrequency, AlphaViolated or BadAlpha.
inline StreamStats validate_stream(std::span<const StreamOp> stream, double alpha) {
  detail::require_alpha(alpha);
  ExactTable freq;
  StreamStats stats = detail::tally(stream, freq);
  if (!within_alpha(stats.inserts, stats.deletes, alpha))
    throw AlphaViolated(stats.inserts, stats.deletes, alpha);
  return stats;
}

inline ExactTable exact_frequencies(std::span<const StreamOp> stream) {
  ExactTable freq;
  detail::tally(stream, freq);
  return freq;
}

/// Insert counts I(x) of every item in the stream.
inline ExactTable insertion_counts(std::span<const StreamOp> stream) {
  ExactTable ins;
  for (const auto& op : stream)
    if (op.is_insert()) ++ins[op.item];
  return ins;
}

/// Deletion counts D(x) of every item in the stream.
inline ExactTable deletion_counts(std::span<const StreamOp> stream) {
  ExactTable del;
  for (const auto& op : stream)
    if (!op.is_insert()) ++del[op.item];
  return del;
}

/// Values of the table sorted non-increasing.
inline std::vector<std::uint64_t> sorted_frequencies(const ExactTable& table) {
  std::vector<std::uint64_t> out;
  out.reserve(table.size());
  for (const auto& [item, f] : table) out.push_back(f);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Items with positive frequency, ascending by id.
inline std::vector<ItemId> support(const ExactTable& table) {
  std::vector<ItemId> out;
  for (const auto& [item, f] : table)
    if (f > 0) out.push_back(item);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Text stream files: one `I <item>` or `D <item>` per line, `#` lines ignored.
//
// A token made only of decimal digits that fits in 64 bits is taken as the
// item id itself, so generated streams round-trip exactly. Any other token is
// mapped through 64-bit FNV-1a (offset 0xcbf29ce484222325, prime 0x100000001b3).
// ---------------------------------------------------------------------------

inline ItemId fnv1a64(std::string_view token) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : token) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline ItemId item_from_token(std::string_view token) noexcept {
  ItemId value = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && std::all_of(first, last, [](char c) { return c >= '0' && c <= '9'; })) {
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc() && ptr == last) return value;
  }
  return fnv1a64(token);
}

/// Parsed stream file: ops plus any leading `#` lines, verbatim.
struct StreamFile {
  std::vector<StreamOp> ops;
  std::vector<std::string> comments;
};

inline StreamFile read_stream(std::istream& in) {
  StreamFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    const auto first = sv.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    sv.remove_prefix(first);
    if (sv.front() == '#') {
      out.comments.emplace_back(sv);
      continue;
    }
    const auto bad = [&] {
      return FormatError("stream line " + std::to_string(lineno) +
                         ": expected `I <item>` or `D <item>`");
    };
    if (sv.size() < 3 || (sv[0] != 'I' && sv[0] != 'D') || (sv[1] != ' ' && sv[1] != '\t'))
      throw bad();
    std::string_view tok = sv.substr(2);
    tok.remove_prefix(std::min(tok.find_first_not_of(" \t"), tok.size()));
    const auto end = tok.find_first_of(" \t");
    if (end != std::string_view::npos) {
      if (tok.find_first_not_of(" \t", end) != std::string_view::npos) throw bad();
      tok = tok.substr(0, end);
    }
    if (tok.empty()) throw bad();
    out.ops.push_back({item_from_token(tok), sv[0] == 'I' ? OpKind::Insertion : OpKind::Deletion});
  }
  return out;
}

inline void write_stream(std::ostream& out, std::span<const StreamOp> ops,
                         std::string_view header = {}) {
  if (!header.empty()) out << header << '\n';
  for (const auto& op : ops) out << (op.is_insert() ? "I " : "D ") << op.item << '\n';
}

} // namespace sspm

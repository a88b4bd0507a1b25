#pragma once

// Stream generators: Zipf with suffix deletions, an interleaved 60/40
// insert/update mix, and the adversarial interleaving that breaks the legacy
// single-count update.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "sspm/detail/counter_index.hpp"
#include "sspm/random.hpp"
#include "sspm/stream.hpp"

namespace sspm {

enum class WorkloadKind { ZipfSuffixDelete, InterleavedZipf, Adversarial };

inline const char* to_string(WorkloadKind k) {
  switch (k) {
    case WorkloadKind::ZipfSuffixDelete: return "zipf-suffix";
    case WorkloadKind::InterleavedZipf: return "interleaved";
    case WorkloadKind::Adversarial: return "adversarial";
  }
  return "?";
}

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::ZipfSuffixDelete;
  double beta = 1.0;
  std::uint64_t universe = 1000;
  std::uint64_t insertions = 0;
  std::uint64_t deletions = 0;
  double alpha = 2.0;
  std::uint64_t seed = 0;
  /// Interleaved only: share of requests that are updates (delete + insert).
  double update_fraction = 0.4;
};

/// Generated stream with its exact totals and the manifest header written
/// ahead of the ops in stream files.
struct Workload {
  std::vector<StreamOp> ops;
  StreamStats stats;
  std::string manifest;
};

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::to_string(v);
}

/// Zipf(beta) over ranks 1..n via a cumulative table and binary search.
/// Rank r is emitted as item id r.
class ZipfDistribution {
public:
  ZipfDistribution(std::uint64_t n, double beta) : beta_(beta) {
    if (n == 0) throw ConfigInvalid("zipf universe must be positive");
    if (!(beta > 0.0)) throw ConfigInvalid("zipf exponent must be positive");
    cdf_.resize(n);
    double acc = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      acc += std::pow(static_cast<double>(i + 1), -beta);
      cdf_[i] = acc;
    }
    normalizer_ = acc;
    for (auto& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
  }

  std::uint64_t universe() const noexcept { return cdf_.size(); }
  double beta() const noexcept { return beta_; }
  /// xi(beta) = sum_{i<=n} i^-beta.
  double normalizer() const noexcept { return normalizer_; }

  double probability(std::uint64_t rank) const {
    return std::pow(static_cast<double>(rank), -beta_) / normalizer_;
  }

  template <class Rng>
  ItemId operator()(Rng& rng) const {
    const double u = draw_unit(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<ItemId>(std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1) + 1);
  }

private:
  double beta_;
  double normalizer_ = 0.0;
  std::vector<double> cdf_;
};

namespace detail {

inline std::string manifest_for(const WorkloadSpec& s) {
  std::string m = "# spec: kind=" + std::string(to_string(s.kind)) + " beta=" + format_number(s.beta) +
                  " universe=" + std::to_string(s.universe) + " insertions=" + std::to_string(s.insertions) +
                  " deletions=" + std::to_string(s.deletions) + " alpha=" + format_number(s.alpha) +
                  " seed=" + std::to_string(s.seed);
  if (s.kind == WorkloadKind::InterleavedZipf) m += " update_fraction=" + format_number(s.update_fraction);
  return m;
}

inline std::string totals_line(const StreamStats& st) {
  return "# totals: inserts=" + std::to_string(st.inserts) + " deletes=" + std::to_string(st.deletes) +
         " f1=" + std::to_string(st.f1) + " alpha_effective=" + format_number(st.alpha_effective());
}

inline void require_spec(const WorkloadSpec& s, WorkloadKind kind) {
  if (s.kind != kind) throw ConfigInvalid(std::string("workload spec kind is not ") + to_string(kind));
  if (s.insertions == 0) throw ConfigInvalid("workload needs at least one insertion");
  if (!(s.alpha >= 1.0)) throw BadAlpha(s.alpha);
  if (!within_alpha(s.insertions, s.deletions, s.alpha))
    throw SpecViolatesAlpha("deletions=" + std::to_string(s.deletions) + " exceed (1-1/alpha)*insertions for alpha=" +
                            format_number(s.alpha));
}

inline Workload finish(std::vector<StreamOp> ops, const WorkloadSpec& spec) {
  Workload w;
  w.ops = std::move(ops);
  try {
    w.stats = validate_stream(w.ops, spec.alpha);
  } catch (const AlphaViolated& e) {
    throw SpecViolatesAlpha(std::string("generated stream broke its alpha: ") + e.what());
  }
  w.manifest = manifest_for(spec) + '\n' + totals_line(w.stats);
  return w;
}

} // namespace detail

/// `insertions` i.i.d. Zipf draws, then `deletions` occurrences chosen
/// uniformly without replacement from the inserted multiset, deleted in a
/// random order.
inline Workload gen_zipf_suffix(const WorkloadSpec& spec) {
  detail::require_spec(spec, WorkloadKind::ZipfSuffixDelete);
  const ZipfDistribution zipf(spec.universe, spec.beta);
  std::mt19937_64 rng(derive_seed(spec.seed, seed_domain::kWorkload));

  std::vector<StreamOp> ops;
  ops.reserve(spec.insertions + spec.deletions);
  std::vector<ItemId> occurrences;
  occurrences.reserve(spec.insertions);
  for (std::uint64_t i = 0; i < spec.insertions; ++i) {
    const ItemId x = zipf(rng);
    ops.push_back(insert_op(x));
    occurrences.push_back(x);
  }
  // Partial Fisher-Yates: the first `deletions` slots become the sample.
  for (std::uint64_t i = 0; i < spec.deletions; ++i) {
    const auto j = i + draw_below(rng, occurrences.size() - i);
    std::swap(occurrences[i], occurrences[j]);
    ops.push_back(delete_op(occurrences[i]));
  }
  return detail::finish(std::move(ops), spec);
}

/// Load-then-run mix: a preload of fresh insertions, then requests that are
/// insertions with probability 1 - update_fraction and otherwise updates (a
/// uniformly chosen live occurrence is deleted, then a fresh Zipf draw is
/// inserted).
///
/// Every request inserts exactly once, so the stream always has exactly
/// `insertions` insertions; the number of requests is deletions/update_fraction
/// so the expected deletion count matches `deletions`.
inline Workload gen_interleaved(const WorkloadSpec& spec) {
  detail::require_spec(spec, WorkloadKind::InterleavedZipf);
  const double p = spec.update_fraction;
  if (!(p >= 0.0 && p < 1.0)) throw ConfigInvalid("update_fraction must lie in [0,1)");
  const ZipfDistribution zipf(spec.universe, spec.beta);
  std::mt19937_64 rng(derive_seed(spec.seed, seed_domain::kWorkload));

  std::uint64_t requests = spec.insertions;
  if (p > 0.0) {
    const auto wanted = static_cast<std::uint64_t>(std::llround(static_cast<double>(spec.deletions) / p));
    requests = std::min(spec.insertions, wanted);
  }
  const std::uint64_t preload = spec.insertions - requests;

  std::vector<StreamOp> ops;
  std::vector<ItemId> live;
  live.reserve(spec.insertions);
  const auto insert_fresh = [&] {
    const ItemId x = zipf(rng);
    ops.push_back(insert_op(x));
    live.push_back(x);
  };
  for (std::uint64_t i = 0; i < preload; ++i) insert_fresh();
  for (std::uint64_t i = 0; i < requests; ++i) {
    if (p > 0.0 && !live.empty() && draw_unit(rng) < p) {
      const auto j = draw_below(rng, live.size());
      ops.push_back(delete_op(live[j]));
      live[j] = live.back();
      live.pop_back();
    }
    insert_fresh();
  }
  return detail::finish(std::move(ops), spec);
}

/// Interleaved stream on which the legacy single-count update with `m`
/// counters loses a frequent item, for m >= 2.
///
/// With T = 4m: a hot item H is inserted T times and m-1 fillers T+1 times
/// each, leaving H as the minimum. A fresh item evicts H and is deleted
/// again. The fillers are then deleted to zero, collapsing the minimum
/// count, so H re-enters at count 1 and after T-1 more insertions is again
/// the smallest entry once the remaining fillers are refilled to T. A second
/// fresh item evicts it. H ends unmonitored with true frequency 2T-1, while
/// the insertion count stays at (2m-1)T + m, i.e. the error exceeds both
/// F1/m and I/m.
///
/// Item ids: H = 1, fillers 2..m, evictors m+1 and m+2.
inline Workload gen_adversarial(std::size_t m) {
  if (m < 2) throw ConfigInvalid("adversarial stream needs m >= 2");
  const std::uint64_t T = 4 * static_cast<std::uint64_t>(m);
  const ItemId hot = 1;
  const auto filler = [](std::size_t i) { return static_cast<ItemId>(1 + i); };  // i in 1..m-1
  const ItemId evictor1 = m + 1;
  const ItemId evictor2 = m + 2;

  std::vector<StreamOp> ops;
  const auto repeat = [&](StreamOp op, std::uint64_t times) { ops.insert(ops.end(), times, op); };

  repeat(insert_op(hot), T);
  for (std::size_t i = 1; i < m; ++i) repeat(insert_op(filler(i)), T + 1);
  ops.push_back(insert_op(evictor1));
  ops.push_back(delete_op(evictor1));
  for (std::size_t i = 1; i < m; ++i) repeat(delete_op(filler(i)), T + 1);
  repeat(insert_op(hot), T - 1);
  for (std::size_t i = 2; i < m; ++i) repeat(insert_op(filler(i)), T);
  ops.push_back(insert_op(evictor2));
  ops.push_back(delete_op(evictor2));

  Workload w;
  w.ops = std::move(ops);
  w.stats = validate_stream(w.ops, std::numeric_limits<double>::infinity());
  w.manifest = "# spec: kind=adversarial m=" + std::to_string(m) + " seed=0\n" +
               "# alpha: " + std::to_string(w.stats.inserts) + "/" + std::to_string(w.stats.f1) + " = " +
               format_number(w.stats.alpha_effective()) + '\n' + detail::totals_line(w.stats);
  return w;
}

inline Workload generate(const WorkloadSpec& spec) {
  switch (spec.kind) {
    case WorkloadKind::ZipfSuffixDelete: return gen_zipf_suffix(spec);
    case WorkloadKind::InterleavedZipf: return gen_interleaved(spec);
    case WorkloadKind::Adversarial: return gen_adversarial(static_cast<std::size_t>(spec.universe));
  }
  throw ConfigInvalid("unknown workload kind");
}

/// Whether f_{ceil(gamma t)} <= f_t / 2 for every t >= 1 with ceil(gamma t) <= n
/// (1-indexed). Throws NotSorted unless freqs is non-increasing.
template <class T>
  requires std::is_arithmetic_v<T>
bool check_gamma_decreasing(std::span<const T> freqs, double gamma) {
  if (!(gamma > 1.0 && gamma < 2.0)) throw ConfigInvalid("gamma must lie in (1,2)");
  for (std::size_t i = 1; i < freqs.size(); ++i)
    if (freqs[i] > freqs[i - 1]) throw NotSorted();
  const std::size_t n = freqs.size();
  for (std::size_t t = 1; t <= n; ++t) {
    const std::size_t j = detail::ceil_count(gamma * static_cast<double>(t));
    if (j > n) break;
    if (2.0 * static_cast<double>(freqs[j - 1]) > static_cast<double>(freqs[t - 1])) return false;
  }
  return true;
}

template <class T>
bool check_gamma_decreasing(const std::vector<T>& freqs, double gamma) {
  return check_gamma_decreasing(std::span<const T>(freqs), gamma);
}

} // namespace sspm

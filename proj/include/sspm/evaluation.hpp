#pragma once

// Accuracy metrics and runtime checks of the error guarantees.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "sspm/double_space_saving.hpp"
#include "sspm/integrated_space_saving.hpp"
#include "sspm/random.hpp"
#include "sspm/stream.hpp"
#include "sspm/workloads.hpp"

namespace sspm {

/// Anything that maps an item to an arithmetic estimate.
template <class F>
concept Estimator = requires(const F& f, ItemId x) {
  { f(x) } -> std::convertible_to<double>;
};

enum class BoundKind { EpsilonF1, Residual, Relative, Variance, Merge };

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::EpsilonF1: return "epsilon-f1";
    case BoundKind::Residual: return "residual";
    case BoundKind::Relative: return "relative";
    case BoundKind::Variance: return "variance";
    case BoundKind::Merge: return "merge";
  }
  return "?";
}

struct Violation {
  ItemId item;
  double exact;
  double estimate;
};

/// Outcome of one bound check: passed <=> violating_items empty <=>
/// max_observed_error <= bound_value.
///
/// Relative reports are expressed as ratios |f - f^| / f against epsilon.
/// Variance reports are normalized (1.0 is the limit); the unnormalized
/// variance limit and the largest observed variance are in raw_bound and
/// raw_observed. Residual reports carry the clean (eps/k) * F1_res form in
/// raw_bound next to the applied bound.
struct BoundReport {
  BoundKind kind = BoundKind::EpsilonF1;
  double bound_value = 0.0;
  double max_observed_error = 0.0;
  std::vector<Violation> violating_items;
  bool passed = true;
  double raw_bound = std::numeric_limits<double>::quiet_NaN();
  double raw_observed = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Bound comparisons tolerate a relative 1e-12 so that representation error in
// epsilon cannot flip an exactly-met bound.
inline bool exceeds(double observed, double bound) {
  return observed > bound + 1e-12 * std::max(1.0, std::abs(bound));
}

inline std::vector<ItemId> sorted_items(const ExactTable& exact) {
  std::vector<ItemId> items;
  items.reserve(exact.size());
  for (const auto& [x, f] : exact) items.push_back(x);
  std::sort(items.begin(), items.end());
  return items;
}

template <Estimator E>
BoundReport absolute_bound(const ExactTable& exact, const E& estimate, double bound, BoundKind kind) {
  BoundReport r;
  r.kind = kind;
  r.bound_value = bound;
  for (ItemId x : sorted_items(exact)) {
    const double f = static_cast<double>(exact.at(x));
    const double est = static_cast<double>(estimate(x));
    const double err = std::abs(f - est);
    r.max_observed_error = std::max(r.max_observed_error, err);
    if (exceeds(err, bound)) r.violating_items.push_back({x, f, est});
  }
  r.passed = r.violating_items.empty();
  return r;
}

/// (item, frequency) pairs sorted by frequency descending, then id ascending.
inline std::vector<std::pair<ItemId, std::uint64_t>> ranked(const ExactTable& exact) {
  std::vector<std::pair<ItemId, std::uint64_t>> v(exact.begin(), exact.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return v;
}

inline double top_k_sum(const ExactTable& exact, std::size_t k) {
  const auto freqs = sorted_frequencies(exact);
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(k, freqs.size()); ++i) s += static_cast<double>(freqs[i]);
  return s;
}

inline double table_f1(const ExactTable& exact) {
  double s = 0.0;
  for (const auto& [x, f] : exact) s += static_cast<double>(f);
  return s;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Mean of |f - f^| / f over items with positive frequency.
template <Estimator E>
double compute_are(const ExactTable& exact, const E& estimate) {
  const auto items = support(exact);
  if (items.empty()) throw EmptySupport();
  double sum = 0.0;
  for (ItemId x : items) {
    const double f = static_cast<double>(exact.at(x));
    sum += std::abs(f - static_cast<double>(estimate(x))) / f;
  }
  return sum / static_cast<double>(items.size());
}

/// Queries every positive-frequency item and returns the k with the largest
/// estimates (ties by smaller id).
template <Estimator E>
std::vector<ItemId> report_topk(const ExactTable& exact, const E& estimate, std::size_t k) {
  std::vector<std::pair<double, ItemId>> scored;
  for (ItemId x : support(exact)) scored.emplace_back(static_cast<double>(estimate(x)), x);
  const auto n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  std::vector<ItemId> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(scored[i].second);
  return out;
}

/// F1 between `reported` and the true top-k. Any item tied with the k-th
/// largest frequency counts as a correct report.
inline double topk_f1(const ExactTable& exact, std::span<const ItemId> reported, std::size_t k) {
  if (k == 0) throw ConfigInvalid("k must be positive");
  if (exact.size() < k) throw InsufficientItems(exact.size(), k);
  const auto freqs = sorted_frequencies(exact);
  const std::uint64_t kth = freqs[k - 1];
  std::unordered_set<ItemId> seen;
  std::size_t hits = 0;
  for (ItemId x : reported) {
    if (!seen.insert(x).second) continue;
    if (frequency_of(exact, x) >= kth && exact.contains(x)) ++hits;
  }
  if (seen.empty() || hits == 0) return 0.0;
  const double precision = static_cast<double>(hits) / static_cast<double>(seen.size());
  const double recall = static_cast<double>(std::min(hits, k)) / static_cast<double>(k);
  return 2.0 * precision * recall / (precision + recall);
}

/// Fraction of {x : f(x) >= eps * F1} contained in `reported` (1.0 when no
/// item qualifies).
inline double heavy_hitter_recall(const ExactTable& exact, std::span<const ItemId> reported, double eps) {
  const double threshold = eps * detail::table_f1(exact);
  const std::unordered_set<ItemId> got(reported.begin(), reported.end());
  std::size_t heavy = 0, found = 0;
  for (const auto& [x, f] : exact) {
    if (f > 0 && static_cast<double>(f) >= threshold) {
      ++heavy;
      found += got.contains(x);
    }
  }
  return heavy == 0 ? 1.0 : static_cast<double>(found) / static_cast<double>(heavy);
}

// ---------------------------------------------------------------------------
// Theorem-prescribed sizes
// ---------------------------------------------------------------------------

/// k * (ceil(alpha/eps) + 1).
inline std::size_t residual_integrated_capacity(double eps, double alpha, std::size_t k) {
  return k * (integrated_capacity(eps, alpha) + 1);
}

/// m_I = k (ceil(2 alpha/eps) + 1), m_D = k (ceil(2 (alpha-1)/eps) + 1).
inline DoubleSizing residual_double_sizing(double eps, double alpha, std::size_t k) {
  detail::require_epsilon(eps);
  detail::require_alpha_finite(alpha);
  return {k * (detail::ceil_count(2.0 * alpha / eps) + 1), k * (detail::ceil_count(2.0 * (alpha - 1.0) / eps) + 1)};
}

namespace detail {
// (2(gamma-1)/(2-gamma)) * k^(beta+1) / 2^(log_gamma k)
inline double relative_factor(std::size_t k, double beta, double gamma) {
  if (!(gamma > 1.0 && gamma < 2.0)) throw ConfigInvalid("gamma must lie in (1,2)");
  const double kk = static_cast<double>(k);
  return (2.0 * (gamma - 1.0) / (2.0 - gamma)) * std::pow(kk, beta + 1.0) /
         std::pow(2.0, std::log(kk) / std::log(gamma));
}
} // namespace detail

/// k + ceil(factor * alpha/eps).
inline std::size_t relative_integrated_capacity(double eps, double alpha, std::size_t k, double beta, double gamma) {
  detail::require_epsilon(eps);
  detail::require_alpha_finite(alpha);
  return k + detail::ceil_count(detail::relative_factor(k, beta, gamma) * alpha / eps);
}

/// m_I = m_D = k + ceil(factor * (2 alpha - 1)/eps).
inline DoubleSizing relative_double_sizing(double eps, double alpha, std::size_t k, double beta, double gamma) {
  detail::require_epsilon(eps);
  detail::require_alpha_finite(alpha);
  const auto m = k + detail::ceil_count(detail::relative_factor(k, beta, gamma) * (2.0 * alpha - 1.0) / eps);
  return {m, m};
}

// ---------------------------------------------------------------------------
// Bound checks
// ---------------------------------------------------------------------------

/// Every touched item within eps * f1 (items absent from the summary count
/// as estimate 0 through the estimator).
template <Estimator E>
BoundReport check_epsilon_bound(const ExactTable& exact, const E& estimate, double eps, std::uint64_t f1) {
  return detail::absolute_bound(exact, estimate, eps * static_cast<double>(f1), BoundKind::EpsilonF1);
}

/// eps * F1 of the whole stream, reported as a merge check.
template <Estimator E>
BoundReport check_merge_bound(const ExactTable& exact, const E& estimate, double eps, std::uint64_t f1) {
  return detail::absolute_bound(exact, estimate, eps * static_cast<double>(f1), BoundKind::Merge);
}

enum class SketchFamily { Integrated, Double };

/// Residual guarantee for a sketch at the residual theorem size.
///
/// Integrated applies (eps/k) * (F1 - (1/alpha) * top-k sum). Double applies
/// the sharper statement its size actually yields, (eps/k) * (F1 - top-k
/// sum / (2 alpha)). raw_bound always holds the (eps/k) * F1_res form.
template <Estimator E>
BoundReport check_residual_bound(const ExactTable& exact, const E& estimate, double eps, double alpha,
                                 std::size_t k, SketchFamily family = SketchFamily::Integrated) {
  if (k == 0) throw ConfigInvalid("k must be positive");
  const double f1 = detail::table_f1(exact);
  const double top = detail::top_k_sum(exact, k);
  const double clean = eps / static_cast<double>(k) * (f1 - top / alpha);
  const double applied =
      family == SketchFamily::Integrated ? clean : eps / static_cast<double>(k) * (f1 - top / (2.0 * alpha));
  auto r = detail::absolute_bound(exact, estimate, applied, BoundKind::Residual);
  r.raw_bound = clean;
  return r;
}

struct ZipfFit {
  double beta = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit of log f against log rank over the `top` largest
/// positive frequencies; beta is the negated slope.
inline ZipfFit fit_zipf(const ExactTable& exact, std::size_t top = 100) {
  std::vector<double> ys;
  for (auto f : sorted_frequencies(exact)) {
    if (f == 0 || ys.size() == top) break;
    ys.push_back(std::log(static_cast<double>(f)));
  }
  if (ys.size() < 2) throw PreconditionNotMet("zipf fit needs at least two positive frequencies");
  const double n = static_cast<double>(ys.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double x = std::log(static_cast<double>(i + 1));
    sx += x;
    sy += ys[i];
    sxx += x * x;
    sxy += x * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  const double mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double pred = intercept + slope * std::log(static_cast<double>(i + 1));
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  return {-slope, ss_tot == 0.0 ? 0.0 : 1.0 - ss_res / ss_tot};
}

inline constexpr double kMinZipfRSquared = 0.95;

/// Preconditions of the relative guarantee: the sorted insertion counts (and,
/// for Double, the sorted deletion counts) are gamma-decreasing, and the exact
/// frequencies fit a Zipf law with R^2 >= 0.95. Returns the fit; throws
/// PreconditionNotMet otherwise.
inline ZipfFit relative_preconditions(const ExactTable& exact, const ExactTable& inserts,
                                      const ExactTable* deletes, double gamma) {
  if (!check_gamma_decreasing(sorted_frequencies(inserts), gamma))
    throw PreconditionNotMet("insertion counts are not gamma-decreasing");
  if (deletes && !deletes->empty() && !check_gamma_decreasing(sorted_frequencies(*deletes), gamma))
    throw PreconditionNotMet("deletion counts are not gamma-decreasing");
  const auto fit = fit_zipf(exact);
  if (fit.r_squared < kMinZipfRSquared)
    throw PreconditionNotMet("exact frequencies do not fit a Zipf law (R^2 = " + std::to_string(fit.r_squared) + ")");
  return fit;
}

/// |f_i - f^_i| <= eps * f_i for the k most frequent items. Preconditions
/// are checked first (see relative_preconditions).
template <Estimator E>
BoundReport check_relative_bound(const ExactTable& exact, const ExactTable& inserts, const ExactTable* deletes,
                                 const E& estimate, double eps, std::size_t k, double gamma) {
  if (k == 0) throw ConfigInvalid("k must be positive");
  relative_preconditions(exact, inserts, deletes, gamma);
  const auto ranks = detail::ranked(exact);
  if (ranks.size() < k) throw InsufficientItems(ranks.size(), k);
  BoundReport r;
  r.kind = BoundKind::Relative;
  r.bound_value = eps;
  for (std::size_t i = 0; i < k; ++i) {
    const auto [x, fx] = ranks[i];
    const double f = static_cast<double>(fx);
    const double est = static_cast<double>(estimate(x));
    const double ratio = f > 0 ? std::abs(f - est) / f : (est == 0 ? 0.0 : std::numeric_limits<double>::infinity());
    r.max_observed_error = std::max(r.max_observed_error, ratio);
    if (detail::exceeds(ratio, eps)) r.violating_items.push_back({x, f, est});
  }
  r.passed = r.violating_items.empty();
  return r;
}

/// Declared calibration constants for the Monte-Carlo unbiasedness check.
inline constexpr double kVarianceSlack = 1.1;
inline constexpr double kMeanWindowSigmas = 4.0;

enum class VarianceQuery { Raw, Clipped };

/// Runs the unbiased Double SpaceSaving± sized for (eps, alpha) over `stream`
/// with `trials` derived seeds. Per item, the mean estimate must lie within
/// 4 standard errors of f and the variance must not exceed 1.1 * eps^2 F1^2.
///
/// The report is normalized: each item scores
/// max(var / (1.1 eps^2 F1^2), |mean - f| / (4 se)), and the bound is 1.
/// `Clipped` swaps in the clipped query to expose its bias.
inline BoundReport check_variance(std::span<const StreamOp> stream, double eps, double alpha, std::size_t trials,
                                  std::uint64_t base_seed, VarianceQuery query = VarianceQuery::Raw) {
  if (trials < 1000) throw ConfigInvalid("variance check needs at least 1000 trials");
  const ExactTable exact = exact_frequencies(stream);
  const auto items = detail::sorted_items(exact);
  const double f1 = detail::table_f1(exact);
  const double var_limit = kVarianceSlack * eps * eps * f1 * f1;

  // Welford accumulators per item.
  std::vector<double> mean(items.size(), 0.0), m2(items.size(), 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    auto s = DoubleSummary::for_error(eps, alpha, true, derive_seed(base_seed ^ seed_domain::kTrial, t));
    for (const auto& op : stream) s.update(op);
    const double n = static_cast<double>(t + 1);
    for (std::size_t i = 0; i < items.size(); ++i) {
      const double v = query == VarianceQuery::Raw ? static_cast<double>(s.query_raw(items[i]))
                                                   : static_cast<double>(s.query(items[i]));
      const double d = v - mean[i];
      mean[i] += d / n;
      m2[i] += d * (v - mean[i]);
    }
  }

  BoundReport r;
  r.kind = BoundKind::Variance;
  r.bound_value = 1.0;
  r.raw_bound = var_limit / kVarianceSlack;
  r.raw_observed = 0.0;
  const double n = static_cast<double>(trials);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double f = static_cast<double>(exact.at(items[i]));
    const double var = m2[i] / (n - 1.0);
    const double se = std::sqrt(var / n);
    const double gap = std::abs(mean[i] - f);
    double mean_score = 0.0;
    if (se > 0.0)
      mean_score = gap / (kMeanWindowSigmas * se);
    else if (gap > 1e-9)
      mean_score = std::numeric_limits<double>::infinity();
    const double var_score = var_limit > 0.0 ? var / var_limit : (var > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    const double score = std::max(mean_score, var_score);
    r.raw_observed = std::max(r.raw_observed, var);
    r.max_observed_error = std::max(r.max_observed_error, score);
    if (detail::exceeds(score, 1.0)) r.violating_items.push_back({items[i], f, mean[i]});
  }
  r.passed = r.violating_items.empty();
  return r;
}

} // namespace sspm

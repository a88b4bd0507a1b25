#pragma once

// Counter-budget sweeps over a workload, CSV output, and the legacy-sketch
// counterexample report.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sspm/double_space_saving.hpp"
#include "sspm/evaluation.hpp"
#include "sspm/grid_sketch.hpp"
#include "sspm/integrated_space_saving.hpp"
#include "sspm/legacy_space_saving.hpp"
#include "sspm/space_saving.hpp"
#include "sspm/workloads.hpp"

namespace sspm {

enum class SketchKind { SS, USS, DSS, UDSS, ISS, LegacySSPM, CountMin, CountSketch };

inline const char* to_string(SketchKind k) {
  switch (k) {
    case SketchKind::SS: return "SS";
    case SketchKind::USS: return "USS";
    case SketchKind::DSS: return "DSS";
    case SketchKind::UDSS: return "UDSS";
    case SketchKind::ISS: return "ISS";
    case SketchKind::LegacySSPM: return "LegacySSPM";
    case SketchKind::CountMin: return "CountMin";
    case SketchKind::CountSketch: return "CountSketch";
  }
  return "?";
}

/// Case-insensitive; throws ConfigInvalid for unknown names.
inline SketchKind parse_sketch_kind(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "ss") return SketchKind::SS;
  if (lower == "uss") return SketchKind::USS;
  if (lower == "dss") return SketchKind::DSS;
  if (lower == "udss") return SketchKind::UDSS;
  if (lower == "iss") return SketchKind::ISS;
  if (lower == "legacysspm" || lower == "legacy") return SketchKind::LegacySSPM;
  if (lower == "countmin" || lower == "cm") return SketchKind::CountMin;
  if (lower == "countsketch" || lower == "cs") return SketchKind::CountSketch;
  throw ConfigInvalid("unknown sketch '" + std::string(name) + "'");
}

/// Model class of a sketch, written to the `kind` column.
inline const char* model_class(SketchKind k) {
  switch (k) {
    case SketchKind::SS:
    case SketchKind::USS: return "insertion-only";
    case SketchKind::DSS:
    case SketchKind::UDSS:
    case SketchKind::ISS: return "bounded-deletion";
    case SketchKind::LegacySSPM: return "legacy";
    case SketchKind::CountMin:
    case SketchKind::CountSketch: return "turnstile";
  }
  return "?";
}

struct SketchCell {
  SketchKind kind;
  std::size_t budget;  // total fields
};

struct ExperimentConfig {
  WorkloadSpec workload;
  /// When set, ops are read from this stream file instead of generated.
  std::optional<std::string> workload_file;
  std::vector<SketchCell> sketches;
  double epsilon = 0.01;
  double alpha = 2.0;
  std::size_t k_top = 100;
  std::uint64_t seed = 0;
  /// Off by default so that identical configs give byte-identical CSV.
  bool record_timing = false;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigInvalid("epsilon must lie in (0,1)");
    if (!(alpha >= 1.0)) throw ConfigInvalid("alpha must be >= 1");
    if (k_top == 0) throw ConfigInvalid("k must be positive");
    for (const auto& c : sketches)
      if (c.budget == 0) throw ConfigInvalid("budgets must be positive");
  }
};

/// Every (sketch, budget) pair in roster order, budgets innermost.
inline std::vector<SketchCell> sweep(std::span<const SketchKind> kinds, std::span<const std::size_t> budgets) {
  std::vector<SketchCell> out;
  for (auto k : kinds)
    for (auto b : budgets) out.push_back({k, b});
  return out;
}

struct ExperimentRow {
  SketchKind sketch;
  std::size_t budget_fields = 0;  // achieved, <= configured
  std::size_t entries = 0;        // summary entries, or grid cells
  double epsilon = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double are = 0.0;
  std::optional<double> f1_topk;
  double max_error = 0.0;
  double eps_f1_bound = 0.0;
  bool eps_bound_pass = false;
  std::optional<bool> residual_bound_pass;
  double runtime_ms = 0.0;
  /// The sketch's size meets the guarantee for (epsilon, alpha), so a failed
  /// bound is a correctness violation rather than an undersized budget.
  bool guaranteed = false;

  bool violates() const {
    return guaranteed && (!eps_bound_pass || residual_bound_pass == false);
  }
};

struct ExperimentResult {
  StreamStats stats;
  std::vector<ExperimentRow> rows;

  bool bound_violation() const {
    return std::any_of(rows.begin(), rows.end(), [](const ExperimentRow& r) { return r.violates(); });
  }
};

inline constexpr std::string_view kCsvHeader =
    "sketch,kind,budget_fields,entries,epsilon,alpha,seed,are,f1_topk,max_error,eps_f1_bound,"
    "eps_bound_pass,residual_bound_pass,runtime_ms";

/// RFC 4180: quote fields containing a comma, quote, CR or LF.
inline std::string csv_field(std::string_view v) {
  if (v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string to_csv(const ExperimentRow& r) {
  const auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  const std::string fields[] = {
      to_string(r.sketch),
      model_class(r.sketch),
      std::to_string(r.budget_fields),
      std::to_string(r.entries),
      format_number(r.epsilon),
      format_number(r.alpha),
      std::to_string(r.seed),
      format_number(r.are),
      r.f1_topk ? format_number(*r.f1_topk) : "NA",
      format_number(r.max_error),
      format_number(r.eps_f1_bound),
      flag(r.eps_bound_pass),
      r.residual_bound_pass ? flag(*r.residual_bound_pass) : "NA",
      format_number(r.runtime_ms),
  };
  std::string line;
  for (const auto& f : fields) {
    if (!line.empty()) line += ',';
    line += csv_field(f);
  }
  return line;
}

inline void write_csv(std::ostream& out, std::span<const ExperimentRow> rows) {
  out << kCsvHeader << "\r\n";
  for (const auto& r : rows) out << to_csv(r) << "\r\n";
}

inline constexpr std::string_view kBoundCsvHeader =
    "bound_kind,bound_value,max_observed_error,violations,passed";

inline std::string to_csv(const BoundReport& r) {
  return std::string(to_string(r.kind)) + ',' + format_number(r.bound_value) + ',' +
         format_number(r.max_observed_error) + ',' + std::to_string(r.violating_items.size()) + ',' +
         (r.passed ? "true" : "false");
}

namespace detail {

/// Split `entries` between the insertion and deletion sides in the ratio
/// alpha : (alpha - 1), each side at least one entry.
inline DoubleSizing split_double_budget(std::size_t entries, double alpha) {
  if (entries < 2) throw BudgetTooSmall("double summary needs at least 4 fields");
  auto ins = static_cast<std::size_t>(static_cast<double>(entries) * alpha / (2.0 * alpha - 1.0));
  ins = std::clamp<std::size_t>(ins, 1, entries - 1);
  return {ins, entries - ins};
}

/// Largest k with every side at least k times its residual unit size.
inline std::size_t admissible_k(std::size_t capacity, std::size_t unit) {
  return unit == 0 ? 0 : capacity / unit;
}

struct BuiltSketch {
  std::size_t fields = 0;
  std::size_t entries = 0;
  bool guaranteed = false;
  std::optional<std::pair<std::size_t, SketchFamily>> residual_k;
  std::function<void(const StreamOp&)> update;
  std::function<double(ItemId)> query;
};

template <class S>
std::shared_ptr<S> share(S s) {
  return std::make_shared<S>(std::move(s));
}

inline BuiltSketch build(const SketchCell& cell, const ExperimentConfig& cfg, std::uint64_t universe) {
  BuiltSketch b;
  const auto need = [&](std::size_t per_entry) {
    const auto n = cell.budget / per_entry;
    if (n == 0)
      throw BudgetTooSmall(std::string(to_string(cell.kind)) + " needs at least " + std::to_string(per_entry) +
                           " fields, got " + std::to_string(cell.budget));
    return n;
  };
  switch (cell.kind) {
    case SketchKind::SS:
    case SketchKind::USS: {
      const auto m = need(2);
      auto s = share(CounterSummary(m));
      b.fields = 2 * m;
      b.entries = m;
      if (cell.kind == SketchKind::SS) {
        b.update = [s](const StreamOp& op) {
          if (op.is_insert()) s->insert(op.item);
        };
      } else {
        auto rng = std::make_shared<std::mt19937_64>(derive_seed(cfg.seed, seed_domain::kInsertSide));
        b.update = [s, rng](const StreamOp& op) {
          if (op.is_insert()) s->insert_unbiased(op.item, *rng);
        };
      }
      b.query = [s](ItemId x) { return static_cast<double>(s->query(x)); };
      break;
    }
    case SketchKind::DSS:
    case SketchKind::UDSS: {
      const auto sizing = split_double_budget(cell.budget / 2, cfg.alpha);
      auto s = share(DoubleSummary(sizing, cell.kind == SketchKind::UDSS, cfg.seed));
      b.fields = s->field_count();
      b.entries = sizing.insert_capacity + sizing.delete_capacity;
      const auto need_sizing = double_sizing(cfg.epsilon, cfg.alpha);
      b.guaranteed = cell.kind == SketchKind::DSS && sizing.insert_capacity >= need_sizing.insert_capacity &&
                     sizing.delete_capacity >= need_sizing.delete_capacity;
      if (cell.kind == SketchKind::DSS) {
        const auto unit = residual_double_sizing(cfg.epsilon, cfg.alpha, 1);
        const auto k = std::min(admissible_k(sizing.insert_capacity, unit.insert_capacity),
                                admissible_k(sizing.delete_capacity, unit.delete_capacity));
        if (k > 0) b.residual_k = {{k, SketchFamily::Double}};
      }
      b.update = [s](const StreamOp& op) { s->update(op); };
      b.query = [s](ItemId x) { return static_cast<double>(s->query(x)); };
      break;
    }
    case SketchKind::ISS: {
      const auto m = need(3);
      auto s = share(IntegratedSummary(m));
      b.fields = s->field_count();
      b.entries = m;
      b.guaranteed = m >= integrated_capacity(cfg.epsilon, cfg.alpha);
      const auto k = admissible_k(m, residual_integrated_capacity(cfg.epsilon, cfg.alpha, 1));
      if (k > 0) b.residual_k = {{k, SketchFamily::Integrated}};
      b.update = [s](const StreamOp& op) { s->update(op); };
      b.query = [s](ItemId x) { return static_cast<double>(s->query(x)); };
      break;
    }
    case SketchKind::LegacySSPM: {
      const auto m = need(2);
      auto s = share(LegacySpaceSavingPM(m));
      b.fields = s->field_count();
      b.entries = m;
      b.update = [s](const StreamOp& op) { s->update(op); };
      b.query = [s](ItemId x) { return static_cast<double>(s->query(x)); };
      break;
    }
    case SketchKind::CountMin:
    case SketchKind::CountSketch: {
      auto s = share(GridSketch(cell.kind == SketchKind::CountMin ? GridKind::CountMin : GridKind::CountSketch,
                                cell.budget, universe, cfg.seed));
      b.fields = s->field_count();
      b.entries = s->field_count();
      b.update = [s](const StreamOp& op) { s->update(op); };
      b.query = [s](ItemId x) { return s->query(x); };
      break;
    }
  }
  return b;
}

} // namespace detail

/// Loads or generates the configured stream, validated against cfg.alpha.
inline std::vector<StreamOp> load_workload(const ExperimentConfig& cfg) {
  if (!cfg.workload_file) return generate(cfg.workload).ops;
  std::ifstream in(*cfg.workload_file);
  if (!in) throw ConfigInvalid("cannot open stream file '" + *cfg.workload_file + "'");
  auto ops = read_stream(in).ops;
  validate_stream(ops, cfg.alpha);
  return ops;
}

/// Streams `ops` once through every configured sketch. Rows follow config
/// order. Deterministic given the config unless record_timing is set.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::span<const StreamOp> ops) {
  cfg.validate();
  ExperimentResult result;
  result.stats = validate_stream(ops, cfg.alpha);
  const ExactTable exact = exact_frequencies(ops);
  const std::uint64_t universe =
      cfg.workload_file ? std::max<std::uint64_t>(exact.size(), 1) : cfg.workload.universe;
  const double bound = cfg.epsilon * static_cast<double>(result.stats.f1);
  const bool has_support = !support(exact).empty();

  for (const auto& cell : cfg.sketches) {
    auto sk = detail::build(cell, cfg, universe);
    const auto start = std::chrono::steady_clock::now();
    for (const auto& op : ops) sk.update(op);
    const auto stop = std::chrono::steady_clock::now();

    ExperimentRow row;
    row.sketch = cell.kind;
    row.budget_fields = sk.fields;
    row.entries = sk.entries;
    row.epsilon = cfg.epsilon;
    row.alpha = cfg.alpha;
    row.seed = cfg.seed;
    row.guaranteed = sk.guaranteed;
    row.eps_f1_bound = bound;
    if (has_support) row.are = compute_are(exact, sk.query);
    if (support(exact).size() >= cfg.k_top) {
      const auto reported = report_topk(exact, sk.query, cfg.k_top);
      row.f1_topk = topk_f1(exact, reported, cfg.k_top);
    }
    const auto eps_report = check_epsilon_bound(exact, sk.query, cfg.epsilon, result.stats.f1);
    row.max_error = eps_report.max_observed_error;
    row.eps_bound_pass = eps_report.passed;
    if (sk.residual_k)
      row.residual_bound_pass =
          check_residual_bound(exact, sk.query, cfg.epsilon, cfg.alpha, sk.residual_k->first, sk.residual_k->second)
              .passed;
    if (cfg.record_timing)
      row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    result.rows.push_back(std::move(row));
  }
  return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto ops = load_workload(cfg);
  return run_experiment(cfg, ops);
}

// ---------------------------------------------------------------------------
// Legacy counterexample
// ---------------------------------------------------------------------------

struct ErrataReport {
  std::size_t m = 0;
  StreamStats stats;
  /// Legacy sketch with m entries against F1/m.
  BoundReport legacy_vs_f1;
  /// The same run against the weaker I/m.
  BoundReport legacy_vs_inserts;
  /// Integrated summary sized for eps = 1/m at the stream's own alpha = I/F1.
  std::size_t iss_capacity = 0;
  BoundReport iss_matched;
  /// Integrated summary with the legacy sketch's m entries, against I/m.
  BoundReport iss_same_entries;
};

/// Deterministic: the stream has no randomness and neither sketch draws any.
inline ErrataReport demo_errata(std::size_t m) {
  const auto w = gen_adversarial(m);
  const ExactTable exact = exact_frequencies(w.ops);
  const double eps = 1.0 / static_cast<double>(m);

  ErrataReport r;
  r.m = m;
  r.stats = w.stats;

  LegacySpaceSavingPM legacy(m);
  for (const auto& op : w.ops) legacy.update(op);
  const auto lq = [&](ItemId x) { return static_cast<double>(legacy.query(x)); };
  r.legacy_vs_f1 = check_epsilon_bound(exact, lq, eps, w.stats.f1);
  r.legacy_vs_inserts = check_epsilon_bound(exact, lq, eps, w.stats.inserts);

  // ceil(alpha / eps) with alpha = I / F1, in integers.
  r.iss_capacity = static_cast<std::size_t>((w.stats.inserts * m + w.stats.f1 - 1) / w.stats.f1);
  IntegratedSummary matched(r.iss_capacity);
  IntegratedSummary same(m);
  for (const auto& op : w.ops) {
    matched.update(op);
    same.update(op);
  }
  r.iss_matched = check_epsilon_bound(exact, [&](ItemId x) { return static_cast<double>(matched.query(x)); }, eps,
                                      w.stats.f1);
  r.iss_same_entries = check_epsilon_bound(
      exact, [&](ItemId x) { return static_cast<double>(same.query(x)); }, eps, w.stats.inserts);
  return r;
}

inline std::string format_report(std::string_view label, const BoundReport& r) {
  std::ostringstream os;
  os << label << ": " << (r.passed ? "PASS" : "FAIL") << " bound=" << format_number(r.bound_value)
     << " max_error=" << format_number(r.max_observed_error) << " violations=" << r.violating_items.size();
  for (const auto& v : r.violating_items)
    os << "\n  item " << v.item << ": exact " << format_number(v.exact) << ", estimate "
       << format_number(v.estimate);
  return os.str();
}

inline std::string format_errata(const ErrataReport& r) {
  std::ostringstream os;
  os << "adversarial stream, m=" << r.m << ": ops=" << r.stats.n_ops << " I=" << r.stats.inserts
     << " D=" << r.stats.deletes << " F1=" << r.stats.f1
     << " alpha=I/F1=" << format_number(r.stats.alpha_effective()) << '\n'
     << format_report("legacy SpaceSaving+- (m=" + std::to_string(r.m) + ") vs F1/m", r.legacy_vs_f1) << '\n'
     << format_report("legacy SpaceSaving+- (m=" + std::to_string(r.m) + ") vs I/m", r.legacy_vs_inserts) << '\n'
     << format_report("integrated SpaceSaving+- (m=" + std::to_string(r.iss_capacity) + ") vs F1/m",
                      r.iss_matched)
     << '\n'
     << format_report("integrated SpaceSaving+- (m=" + std::to_string(r.m) + ") vs I/m", r.iss_same_entries)
     << '\n';
  return os.str();
}

} // namespace sspm

// sspm: run sketch-budget sweeps, reproduce the legacy counterexample, and
// validate stream files.
//
// Exit status: 0 success, 1 configuration or validation error, 2 a
// bounded-deletion sketch sized for (epsilon, alpha) violated its bound.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sspm/sspm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitViolation = 2;

struct RunArgs {
  std::string workload = "zipf-suffix";
  double beta = 1.0;
  std::uint64_t universe = 65536;
  std::uint64_t insertions = 100000;
  std::uint64_t deletions = 50000;
  double alpha = 2.0;
  double epsilon = 0.01;
  double update_fraction = 0.4;
  std::vector<std::string> sketches{"ISS", "DSS", "UDSS", "CountSketch", "CountMin"};
  std::vector<std::size_t> budgets{2048, 4096, 8192, 16384};
  std::size_t k = 100;
  std::uint64_t seed = 1;
  std::string out;
  bool timing = false;
};

sspm::WorkloadKind parse_workload_kind(const std::string& name) {
  if (name == "zipf-suffix") return sspm::WorkloadKind::ZipfSuffixDelete;
  if (name == "interleaved") return sspm::WorkloadKind::InterleavedZipf;
  throw sspm::ConfigInvalid("unknown workload '" + name + "' (expected zipf-suffix, interleaved or file:<path>)");
}

sspm::ExperimentConfig make_config(const RunArgs& a) {
  sspm::ExperimentConfig cfg;
  if (a.workload.rfind("file:", 0) == 0) {
    cfg.workload_file = a.workload.substr(5);
    if (cfg.workload_file->empty()) throw sspm::ConfigInvalid("file: workload needs a path");
  } else {
    cfg.workload.kind = parse_workload_kind(a.workload);
  }
  cfg.workload.beta = a.beta;
  cfg.workload.universe = a.universe;
  cfg.workload.insertions = a.insertions;
  cfg.workload.deletions = a.deletions;
  cfg.workload.alpha = a.alpha;
  cfg.workload.seed = a.seed;
  cfg.workload.update_fraction = a.update_fraction;

  std::vector<sspm::SketchKind> kinds;
  for (const auto& s : a.sketches) kinds.push_back(sspm::parse_sketch_kind(s));
  cfg.sketches = sspm::sweep(kinds, a.budgets);
  cfg.epsilon = a.epsilon;
  cfg.alpha = a.alpha;
  cfg.k_top = a.k;
  cfg.seed = a.seed;
  cfg.record_timing = a.timing;
  return cfg;
}

int cmd_run(const RunArgs& a) {
  const auto cfg = make_config(a);
  const auto result = sspm::run_experiment(cfg);
  if (a.out.empty() || a.out == "-") {
    sspm::write_csv(std::cout, result.rows);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw sspm::ConfigInvalid("cannot write '" + a.out + "'");
    sspm::write_csv(out, result.rows);
  }
  if (result.bound_violation()) {
    for (const auto& r : result.rows)
      if (r.violates())
        std::cerr << "bound violation: " << sspm::to_string(r.sketch) << " at " << r.budget_fields << " fields\n";
    return kExitViolation;
  }
  return kExitOk;
}

int cmd_errata(std::size_t m) {
  const auto report = sspm::demo_errata(m);
  std::cout << sspm::format_errata(report);
  return kExitOk;
}

int cmd_validate(const std::string& path, double alpha) {
  std::ifstream in(path);
  if (!in) throw sspm::ConfigInvalid("cannot open '" + path + "'");
  const auto file = sspm::read_stream(in);
  const auto st = sspm::validate_stream(file.ops, alpha);
  std::cout << "valid: ops=" << st.n_ops << " I=" << st.inserts << " D=" << st.deletes << " F1=" << st.f1
            << " alpha_effective=" << sspm::format_number(st.alpha_effective()) << '\n';
  return kExitOk;
}

int cmd_generate(const RunArgs& a, std::size_t adversarial_m) {
  sspm::Workload w;
  if (a.workload == "adversarial") {
    w = sspm::gen_adversarial(adversarial_m);
  } else {
    auto cfg = make_config(a);
    if (cfg.workload_file) throw sspm::ConfigInvalid("generate needs a generated workload");
    w = sspm::generate(cfg.workload);
  }
  if (a.out.empty() || a.out == "-") {
    sspm::write_stream(std::cout, w.ops, w.manifest);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw sspm::ConfigInvalid("cannot write '" + a.out + "'");
    sspm::write_stream(out, w.ops, w.manifest);
  }
  return kExitOk;
}

void add_workload_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--beta", a.beta, "Zipf skew")->capture_default_str();
  cmd->add_option("--universe", a.universe, "Zipf universe size")->capture_default_str();
  cmd->add_option("--insertions", a.insertions, "Number of insertions")->capture_default_str();
  cmd->add_option("--deletions", a.deletions, "Number of deletions")->capture_default_str();
  cmd->add_option("--alpha", a.alpha, "Deletion bound: D <= (1 - 1/alpha) I")->capture_default_str();
  cmd->add_option("--update-fraction", a.update_fraction, "Interleaved: share of update requests")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Seed for workload and randomized sketches")->capture_default_str();
  cmd->add_option("--out", a.out, "Output path (default stdout)");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"SpaceSaving± sketches for bounded-deletion streams"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Sweep sketches over counter budgets and write CSV");
  run_cmd->add_option("--workload", run.workload, "zipf-suffix | interleaved | file:<path>")->capture_default_str();
  add_workload_options(run_cmd, run);
  run_cmd->add_option("--epsilon", run.epsilon, "Error parameter for bounds")->capture_default_str();
  run_cmd->add_option("--sketches", run.sketches, "SS,USS,DSS,UDSS,ISS,LegacySSPM,CountMin,CountSketch")
      ->delimiter(',')
      ->capture_default_str();
  run_cmd->add_option("--budgets", run.budgets, "Total field budgets")->delimiter(',')->capture_default_str();
  run_cmd->add_option("--k", run.k, "Top-k size for F1")->capture_default_str();
  run_cmd->add_flag("--timing", run.timing, "Record runtime_ms (output no longer reproducible)");

  std::size_t errata_m = 2;
  auto* errata_cmd = app.add_subcommand("errata-demo", "Adversarial stream: legacy SpaceSaving± vs integrated");
  errata_cmd->add_option("--m", errata_m, "Legacy summary size (>= 2)")->capture_default_str();

  std::string validate_file;
  double validate_alpha = 2.0;
  auto* validate_cmd = app.add_subcommand("validate", "Check a stream file against the bounded-deletion model");
  validate_cmd->add_option("--file", validate_file, "Stream file")->required();
  validate_cmd->add_option("--alpha", validate_alpha, "Deletion bound")->capture_default_str();

  RunArgs gen;
  std::size_t gen_m = 2;
  auto* gen_cmd = app.add_subcommand("generate", "Write a generated workload as a stream file");
  gen_cmd->add_option("--workload", gen.workload, "zipf-suffix | interleaved | adversarial")->capture_default_str();
  add_workload_options(gen_cmd, gen);
  gen_cmd->add_option("--m", gen_m, "Adversarial: legacy summary size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*errata_cmd) return cmd_errata(errata_m);
    if (*validate_cmd) return cmd_validate(validate_file, validate_alpha);
    if (*gen_cmd) return cmd_generate(gen, gen_m);
  } catch (const sspm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sspm/integrated_space_saving.hpp"
#include "sspm/legacy_space_saving.hpp"
#include "sspm/workloads.hpp"
#include "support/oracles.hpp"

using namespace sspm;

namespace {

WorkloadSpec suffix_spec(std::uint64_t ins, std::uint64_t del, std::uint64_t seed = 1) {
  WorkloadSpec s;
  s.kind = WorkloadKind::ZipfSuffixDelete;
  s.beta = 1.0;
  s.universe = 5000;
  s.insertions = ins;
  s.deletions = del;
  s.alpha = 2.0;
  s.seed = seed;
  return s;
}

WorkloadSpec interleaved_spec(std::uint64_t ins, std::uint64_t del, std::uint64_t seed = 1) {
  auto s = suffix_spec(ins, del, seed);
  s.kind = WorkloadKind::InterleavedZipf;
  s.beta = 0.99;
  s.universe = 65536;
  return s;
}

std::string as_text(const Workload& w) {
  std::ostringstream os;
  write_stream(os, w.ops, w.manifest);
  return os.str();
}

} // namespace

TEST(ZipfSuffix, PaperScaleStreamValidates) {
  const auto w = gen_zipf_suffix(suffix_spec(100000, 50000));
  EXPECT_EQ(w.stats.n_ops, 150000u);
  EXPECT_EQ(w.stats.inserts, 100000u);
  EXPECT_EQ(w.stats.deletes, 50000u);
  EXPECT_NO_THROW(validate_stream(w.ops, 2.0));
  // All insertions precede all deletions.
  const auto first_delete =
      std::find_if(w.ops.begin(), w.ops.end(), [](const StreamOp& op) { return !op.is_insert(); });
  EXPECT_TRUE(std::all_of(first_delete, w.ops.end(), [](const StreamOp& op) { return !op.is_insert(); }));
}

TEST(ZipfSuffix, NoDeletionsIsInsertionOnly) {
  const auto w = gen_zipf_suffix(suffix_spec(2000, 0));
  EXPECT_EQ(w.stats.deletes, 0u);
  EXPECT_EQ(w.ops.size(), 2000u);
}

TEST(ZipfSuffix, DeterministicPerSeed) {
  EXPECT_EQ(as_text(gen_zipf_suffix(suffix_spec(5000, 2000, 4))), as_text(gen_zipf_suffix(suffix_spec(5000, 2000, 4))));
  EXPECT_NE(as_text(gen_zipf_suffix(suffix_spec(5000, 2000, 4))), as_text(gen_zipf_suffix(suffix_spec(5000, 2000, 5))));
}

TEST(ZipfSuffix, SpecBreakingAlphaRejected) {
  EXPECT_THROW(gen_zipf_suffix(suffix_spec(100, 51)), SpecViolatesAlpha);
  auto wrong_kind = suffix_spec(10, 0);
  wrong_kind.kind = WorkloadKind::InterleavedZipf;
  EXPECT_THROW(gen_zipf_suffix(wrong_kind), ConfigInvalid);
}

TEST(ZipfSuffix, ManifestPrecedesOps) {
  const auto w = gen_zipf_suffix(suffix_spec(100, 10, 9));
  EXPECT_EQ(w.manifest.rfind("# spec: kind=zipf-suffix beta=1 ", 0), 0u) << w.manifest;
  EXPECT_NE(w.manifest.find("seed=9"), std::string::npos);
  std::istringstream in(as_text(w));
  const auto parsed = read_stream(in);
  EXPECT_EQ(parsed.ops, w.ops);
  EXPECT_EQ(parsed.comments.size(), 2u);
}

TEST(ZipfDistribution, RankFrequenciesFollowTheLaw) {
  const ZipfDistribution zipf(100, 1.2);
  std::mt19937_64 rng(3);
  std::vector<std::uint64_t> hits(101, 0);
  const std::size_t n = 400000;
  for (std::size_t i = 0; i < n; ++i) ++hits[zipf(rng)];
  EXPECT_EQ(hits[0], 0u);
  for (std::uint64_t r : {1u, 2u, 5u, 20u, 100u}) {
    const double p = zipf.probability(r);
    const double se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(static_cast<double>(hits[r]) / n, p, 5 * se) << "rank " << r;
  }
  double total = 0;
  for (std::uint64_t r = 1; r <= 100; ++r) total += zipf.probability(r);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Interleaved, PaperTotalsWithinAlphaTwo) {
  const auto w = gen_interleaved(interleaved_spec(116645, 39825));
  EXPECT_EQ(w.stats.inserts, 116645u);
  EXPECT_NEAR(static_cast<double>(w.stats.deletes), 39825.0, 1000.0);
  EXPECT_LE(w.stats.alpha_effective(), 2.0);
  EXPECT_NO_THROW(validate_stream(w.ops, 2.0));
  // Deletions are spread through the stream, not collected at the end.
  const auto first_delete = std::find_if(w.ops.begin(), w.ops.end(), [](const StreamOp& op) { return !op.is_insert(); });
  EXPECT_LT(static_cast<std::size_t>(first_delete - w.ops.begin()), w.ops.size() / 2);
  EXPECT_TRUE(w.ops.back().is_insert());
}

TEST(Interleaved, ZeroUpdateFractionIsInsertionOnly) {
  auto spec = interleaved_spec(3000, 0);
  spec.update_fraction = 0.0;
  const auto w = gen_interleaved(spec);
  EXPECT_EQ(w.stats.deletes, 0u);
  EXPECT_EQ(w.stats.inserts, 3000u);
}

TEST(Interleaved, DeterministicPerSeed) {
  EXPECT_EQ(as_text(gen_interleaved(interleaved_spec(4000, 1000, 2))),
            as_text(gen_interleaved(interleaved_spec(4000, 1000, 2))));
}

TEST(Interleaved, UpdateMixMatchesFraction) {
  auto spec = interleaved_spec(50000, 10000, 3);
  const auto w = gen_interleaved(spec);
  // After the preload, each request is either an insertion or a
  // deletion-insertion pair.
  std::size_t pairs = 0;
  for (std::size_t i = 0; i + 1 < w.ops.size(); ++i) pairs += !w.ops[i].is_insert() && w.ops[i + 1].is_insert();
  EXPECT_EQ(pairs, w.stats.deletes);
}

TEST(Adversarial, RecordsAlphaAndDefeatsLegacyOnly) {
  for (std::size_t m = 2; m <= 8; ++m) {
    const auto w = gen_adversarial(m);
    EXPECT_NE(w.manifest.find("# alpha: "), std::string::npos);
    EXPECT_GT(w.stats.f1, 0u);
    EXPECT_NO_THROW(validate_stream(w.ops, w.stats.alpha_effective() * (1 + 1e-12)));

    const auto truth = exact_frequencies(w.ops);
    LegacySpaceSavingPM legacy(m);
    IntegratedSummary iss(m);
    for (const auto& op : w.ops) legacy.update(op), iss.update(op);
    double legacy_err = 0, iss_err = 0;
    for (const auto& [item, f] : truth) {
      legacy_err = std::max(legacy_err, std::abs(static_cast<double>(f) - static_cast<double>(legacy.query(item))));
      iss_err = std::max(iss_err, std::abs(static_cast<double>(f) - static_cast<double>(iss.query(item))));
    }
    const double f1_bound = static_cast<double>(w.stats.f1) / static_cast<double>(m);
    const double i_bound = static_cast<double>(w.stats.inserts) / static_cast<double>(m);
    EXPECT_GT(legacy_err, f1_bound) << "m=" << m;
    EXPECT_LE(iss_err, i_bound) << "m=" << m;
  }
  EXPECT_THROW(gen_adversarial(1), ConfigInvalid);
}

TEST(Adversarial, MTwoPinnedTotals) {
  const auto w = gen_adversarial(2);
  EXPECT_EQ(w.stats.inserts, 26u);
  EXPECT_EQ(w.stats.deletes, 11u);
  EXPECT_EQ(w.stats.f1, 15u);
  EXPECT_EQ(as_text(w), as_text(gen_adversarial(2)));
}

TEST(GammaDecreasing, KnownSequences) {
  EXPECT_TRUE(check_gamma_decreasing(std::vector<std::uint64_t>{16, 8, 4, 2, 1}, 1.5));
  EXPECT_FALSE(check_gamma_decreasing(std::vector<std::uint64_t>{10, 9, 8, 7, 6, 5}, 1.5));
  EXPECT_TRUE(check_gamma_decreasing(std::vector<std::uint64_t>{}, 1.5));
  EXPECT_TRUE(check_gamma_decreasing(std::vector<std::uint64_t>{3}, 1.5));
  EXPECT_THROW(check_gamma_decreasing(std::vector<std::uint64_t>{1, 2}, 1.5), NotSorted);
  EXPECT_THROW(check_gamma_decreasing(std::vector<std::uint64_t>{2, 1}, 2.0), ConfigInvalid);
  EXPECT_THROW(check_gamma_decreasing(std::vector<std::uint64_t>{2, 1}, 1.0), ConfigInvalid);
}

// Integer brute force with gamma = 13/10 against the floating-point check.
TEST(GammaDecreasing, AgreesWithExactRationalOracle) {
  std::mt19937_64 rng(5);
  std::size_t positives = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::uniform_int_distribution<std::size_t> len(0, 40);
    std::vector<std::uint64_t> f(len(rng));
    std::uint64_t v = 1u << 20;
    std::uniform_int_distribution<int> shrink(0, trial % 3 == 0 ? 40 : 70);
    for (auto& e : f) {
      e = v;
      v = std::max<std::uint64_t>(1, v - v * static_cast<std::uint64_t>(shrink(rng)) / 100);
    }
    const bool expected = oracle::gamma_decreasing(f, 13, 10);
    positives += expected;
    ASSERT_EQ(check_gamma_decreasing(f, 1.3), expected) << "trial " << trial;
  }
  EXPECT_GT(positives, 0u);
}

// A pure Zipf(beta) profile is gamma-decreasing iff gamma^-beta <= 1/2 at
// every rank, i.e. gamma >= 2^(1/beta) (up to rounding of ceil).
TEST(GammaDecreasing, IdealZipfThreshold) {
  std::vector<double> zipf2(200), zipf15(200);
  for (std::size_t i = 0; i < 200; ++i) {
    zipf2[i] = 1e9 * std::pow(static_cast<double>(i + 1), -2.0);
    zipf15[i] = 1e9 * std::pow(static_cast<double>(i + 1), -1.5);
  }
  EXPECT_TRUE(check_gamma_decreasing(zipf2, 1.5));   // 1.5^-2 = 0.44
  EXPECT_FALSE(check_gamma_decreasing(zipf15, 1.5));  // 1.5^-1.5 = 0.54
}

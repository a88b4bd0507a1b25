#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "sspm/stream.hpp"
#include "support/oracles.hpp"

using namespace sspm;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr ItemId a = 1, b = 2, x = 7;
}

TEST(ValidateStream, EmptyStreamHasZeroStats) {
  const std::vector<StreamOp> ops;
  const auto st = validate_stream(ops, 2.0);
  EXPECT_EQ(st.n_ops, 0u);
  EXPECT_EQ(st.inserts, 0u);
  EXPECT_EQ(st.deletes, 0u);
  EXPECT_EQ(st.f1, 0u);
}

// D <= (1 - 1/alpha) I: a single insert-delete pair has D = I, which only an
// unbounded alpha admits.
TEST(ValidateStream, InsertThenDeleteExceedsAlphaTwo) {
  const std::vector<StreamOp> ops{insert_op(x), delete_op(x)};
  try {
    validate_stream(ops, 2.0);
    FAIL() << "expected AlphaViolated";
  } catch (const AlphaViolated& e) {
    EXPECT_EQ(e.inserts(), 1u);
    EXPECT_EQ(e.deletes(), 1u);
  }
  const auto st = validate_stream(ops, kInf);
  EXPECT_EQ(st.n_ops, 2u);
  EXPECT_EQ(st.inserts, 1u);
  EXPECT_EQ(st.deletes, 1u);
  EXPECT_EQ(st.f1, 0u);
  EXPECT_TRUE(std::isinf(st.alpha_effective()));
}

TEST(ValidateStream, BoundaryHoldsWithEquality) {
  const std::vector<StreamOp> ops{insert_op(x), insert_op(x), delete_op(x)};
  const auto st = validate_stream(ops, 2.0);
  EXPECT_EQ(st.f1, 1u);
  EXPECT_DOUBLE_EQ(st.alpha_effective(), 2.0);
  EXPECT_THROW(validate_stream(ops, 1.9), AlphaViolated);
}

TEST(ValidateStream, DeleteBeforeInsertReportsItemAndPosition) {
  const std::vector<StreamOp> ops{delete_op(x)};
  try {
    validate_stream(ops, 2.0);
    FAIL() << "expected NegativeFrequency";
  } catch (const NegativeFrequency& e) {
    EXPECT_EQ(e.item(), x);
    EXPECT_EQ(e.position(), 0u);
  }
}

TEST(ValidateStream, NegativePrefixDetectedMidStream) {
  const std::vector<StreamOp> ops{insert_op(a), insert_op(a), insert_op(b), delete_op(b), delete_op(b)};
  try {
    validate_stream(ops, kInf);
    FAIL();
  } catch (const NegativeFrequency& e) {
    EXPECT_EQ(e.item(), b);
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(ValidateStream, AlphaOneForbidsDeletions) {
  const std::vector<StreamOp> ins{insert_op(a), insert_op(b)};
  EXPECT_NO_THROW(validate_stream(ins, 1.0));
  const std::vector<StreamOp> with_del{insert_op(a), insert_op(a), delete_op(a)};
  EXPECT_THROW(validate_stream(with_del, 1.0), AlphaViolated);
}

TEST(ValidateStream, RejectsAlphaBelowOne) {
  const std::vector<StreamOp> ops;
  EXPECT_THROW(validate_stream(ops, 0.5), BadAlpha);
  EXPECT_THROW(validate_stream(ops, std::numeric_limits<double>::quiet_NaN()), BadAlpha);
}

TEST(ExactFrequencies, DirectCount) {
  const std::vector<StreamOp> ops{insert_op(a), insert_op(a), insert_op(b), delete_op(a)};
  const auto f = exact_frequencies(ops);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_EQ(f.at(a), 1u);
  EXPECT_EQ(f.at(b), 1u);
  EXPECT_TRUE(exact_frequencies(std::vector<StreamOp>{}).empty());
}

TEST(ExactFrequencies, ZeroFrequencyItemsRetained) {
  const std::vector<StreamOp> ops{insert_op(a), insert_op(b), insert_op(b), delete_op(a)};
  const auto f = exact_frequencies(ops);
  ASSERT_TRUE(f.contains(a));
  EXPECT_EQ(f.at(a), 0u);
  EXPECT_EQ(support(f), std::vector<ItemId>{b});
}

TEST(ExactFrequencies, ThrowsOnNegativeFrequency) {
  const std::vector<StreamOp> ops{insert_op(a), delete_op(b)};
  EXPECT_THROW(exact_frequencies(ops), NegativeFrequency);
}

TEST(ExactFrequencies, AgreesWithIndependentTally) {
  const auto ops = oracle::random_stream(10000, 2.0, 500, 11);
  const auto f = exact_frequencies(ops);
  const auto ref = oracle::tally(ops);
  ASSERT_EQ(f.size(), ref.size());
  for (const auto& [item, v] : ref) EXPECT_EQ(static_cast<std::int64_t>(f.at(item)), v) << item;
}

TEST(StreamProperties, ValuesSumToF1AndPrefixesStayNonnegative) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto ops = oracle::random_stream(2000, 3.0, 100, seed);
    const auto st = validate_stream(ops, 3.0);
    EXPECT_EQ(st.n_ops, st.inserts + st.deletes);
    std::uint64_t sum = 0;
    for (const auto& [item, f] : exact_frequencies(ops)) sum += f;
    EXPECT_EQ(sum, st.f1);
    for (std::size_t cut : {std::size_t{0}, ops.size() / 3, ops.size() / 2, ops.size() - 1}) {
      std::span<const StreamOp> prefix(ops.data(), cut);
      EXPECT_NO_THROW(validate_stream(prefix, kInf));
    }
  }
}

TEST(StreamCounts, SortedFrequenciesAndSideCounts) {
  const std::vector<StreamOp> ops{insert_op(a), insert_op(a), insert_op(a), insert_op(b), delete_op(a)};
  EXPECT_EQ(sorted_frequencies(exact_frequencies(ops)), (std::vector<std::uint64_t>{2, 1}));
  EXPECT_EQ(insertion_counts(ops).at(a), 3u);
  EXPECT_EQ(deletion_counts(ops).at(a), 1u);
  EXPECT_FALSE(deletion_counts(ops).contains(b));
}

TEST(StreamFile, RoundTripsOps) {
  const auto ops = oracle::random_stream(500, 2.0, 50, 3);
  std::stringstream ss;
  write_stream(ss, ops, "# spec: test");
  const auto parsed = read_stream(ss);
  EXPECT_EQ(parsed.ops, ops);
  ASSERT_EQ(parsed.comments.size(), 1u);
  EXPECT_EQ(parsed.comments[0], "# spec: test");
}

TEST(StreamFile, NumericTokensKeepTheirValueOthersAreHashed) {
  std::istringstream in("I 42\nI user:alice\n\n  # note\nD 42\nI\tuser:alice\r\n");
  const auto parsed = read_stream(in);
  ASSERT_EQ(parsed.ops.size(), 4u);
  EXPECT_EQ(parsed.ops[0], insert_op(42));
  EXPECT_EQ(parsed.ops[1].item, fnv1a64("user:alice"));
  EXPECT_EQ(parsed.ops[2], delete_op(42));
  EXPECT_EQ(parsed.ops[3].item, parsed.ops[1].item);
}

TEST(StreamFile, FnvMatchesPublishedVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(StreamFile, MalformedLinesReportLineNumber) {
  for (const char* text : {"I 1\nX 2\n", "I 1\nI\n", "I 1\nI 1 2\n", "I1\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_stream(in), FormatError) << text;
  }
  std::istringstream in("I 1\nbogus\n");
  try {
    read_stream(in);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

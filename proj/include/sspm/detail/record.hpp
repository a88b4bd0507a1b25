#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "sspm/errors.hpp"

namespace sspm::detail {

/// Whitespace-separated token reader for the versioned text records that
/// summaries serialize to.
class RecordReader {
public:
  explicit RecordReader(std::string_view text) : text_(text) {}

  std::string_view word() {
    skip_space();
    if (pos_ >= text_.size()) throw FormatError("summary record truncated");
    const auto start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void expect(std::string_view keyword) {
    const auto w = word();
    if (w != keyword)
      throw FormatError("summary record: expected `" + std::string(keyword) + "`, got `" +
                        std::string(w) + "`");
  }

  template <class Int>
  Int integer() {
    const auto w = word();
    Int v{};
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size())
      throw FormatError("summary record: bad integer `" + std::string(w) + "`");
    return v;
  }

  std::uint64_t u64() { return integer<std::uint64_t>(); }
  std::int64_t i64() { return integer<std::int64_t>(); }

  void expect_end() {
    skip_space();
    if (pos_ != text_.size()) throw FormatError("summary record: trailing data");
  }

private:
  static bool is_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace sspm::detail

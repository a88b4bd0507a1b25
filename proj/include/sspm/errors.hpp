#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sspm {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A deletion arrived for an item whose running frequency was already zero.
class NegativeFrequency : public Error {
public:
  NegativeFrequency(std::uint64_t item, std::size_t position)
      : Error("negative frequency: item " + std::to_string(item) +
              " deleted at position " + std::to_string(position) +
              " without a matching insertion"),
        item_(item), position_(position) {}

  std::uint64_t item() const noexcept { return item_; }
  std::size_t position() const noexcept { return position_; }

private:
  std::uint64_t item_;
  std::size_t position_;
};

/// The stream's deletions exceed the (1 - 1/alpha) fraction of its insertions.
class AlphaViolated : public Error {
public:
  AlphaViolated(std::uint64_t inserts, std::uint64_t deletes, double alpha)
      : Error("bounded-deletion contract violated: D=" + std::to_string(deletes) +
              " exceeds (1-1/alpha)*I with I=" + std::to_string(inserts) +
              ", alpha=" + std::to_string(alpha)),
        inserts_(inserts), deletes_(deletes), alpha_(alpha) {}

  std::uint64_t inserts() const noexcept { return inserts_; }
  std::uint64_t deletes() const noexcept { return deletes_; }
  double alpha() const noexcept { return alpha_; }

private:
  std::uint64_t inserts_;
  std::uint64_t deletes_;
  double alpha_;
};

class ZeroCapacity : public Error {
public:
  ZeroCapacity() : Error("summary capacity must be at least 1") {}
};

class CapacityMismatch : public Error {
public:
  using Error::Error;
};

class BadEpsilon : public Error {
public:
  explicit BadEpsilon(double eps)
      : Error("epsilon must lie in (0,1), got " + std::to_string(eps)) {}
};

class BadAlpha : public Error {
public:
  explicit BadAlpha(double alpha)
      : Error("alpha must be >= 1, got " + std::to_string(alpha)) {}
};

class NotUnbiasedSummary : public Error {
public:
  NotUnbiasedSummary()
      : Error("raw (unclipped) queries require an unbiased double summary") {}
};

class BudgetTooSmall : public Error {
public:
  using Error::Error;
};

class SpecViolatesAlpha : public Error {
public:
  using Error::Error;
};

class NotSorted : public Error {
public:
  NotSorted() : Error("frequency sequence is not sorted in non-increasing order") {}
};

class EmptySupport : public Error {
public:
  EmptySupport() : Error("no item has positive frequency") {}
};

class InsufficientItems : public Error {
public:
  InsufficientItems(std::size_t have, std::size_t k)
      : Error("need at least " + std::to_string(k) + " items, have " +
              std::to_string(have)) {}
};

class PreconditionNotMet : public Error {
public:
  using Error::Error;
};

class ConfigInvalid : public Error {
public:
  using Error::Error;
};

/// Malformed stream file or serialized summary.
class FormatError : public Error {
public:
  using Error::Error;
};

} // namespace sspm

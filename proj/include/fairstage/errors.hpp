#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fairstage {

// Input violates a type invariant (bad weight, malformed solution, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller broke an operation's precondition (wrong agent count, unbalanced
// graph, swap requested below the 2M threshold, ...).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The exhaustive oracle refused to run: the instance has more valid
// solutions than the budget allows.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t count, std::uint64_t budget)
      : std::runtime_error("enumeration refused: " + std::to_string(count) +
                           " valid solutions exceed budget of " +
                           std::to_string(budget)),
        count_(count),
        budget_(budget) {}

  std::uint64_t count() const noexcept { return count_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t count_;
  std::uint64_t budget_;
};

class RejectionExhausted : public std::runtime_error {
 public:
  explicit RejectionExhausted(std::uint64_t tries)
      : std::runtime_error("rejection sampling gave up after " +
                           std::to_string(tries) + " tries"),
        tries_(tries) {}

  std::uint64_t tries() const noexcept { return tries_; }

 private:
  std::uint64_t tries_;
};

}  // namespace fairstage

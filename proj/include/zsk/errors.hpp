#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zsk {

// Bad input from the caller: malformed literal, violated precondition.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public UsageError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : UsageError(what + " (at offset " + std::to_string(position) + ")"), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// A search ran out of its node budget. Never conflated with a mathematical answer.
class BudgetExhausted : public std::runtime_error {
 public:
  explicit BudgetExhausted(const std::string& where)
      : std::runtime_error("node budget exhausted in " + where) {}
};

// A feasibility guard (group order, rank, k) refused to start a search.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zsk

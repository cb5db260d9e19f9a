#pragma once

#include "zsk/errors.hpp"

#include <cstdint>
#include <limits>

namespace zsk {

struct Budget {
  std::uint64_t nodes = 500'000'000;
  static Budget unlimited() { return Budget{std::numeric_limits<std::uint64_t>::max()}; }
};

class NodeCounter {
 public:
  explicit NodeCounter(Budget b = {}) : limit_(b.nodes) {}
  void tick(const char* where) {
    if (++used_ > limit_) throw BudgetExhausted(where);
  }
  std::uint64_t used() const { return used_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

}  // namespace zsk

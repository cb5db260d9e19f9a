#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace zsk {

using BigInt = boost::multiprecision::cpp_int;

// Integer or +infinity. Bounds and s_{<=k} values use this; there is no
// sentinel encoding of infinity anywhere.
class Extended {
 public:
  Extended() = default;
  Extended(BigInt v) : value_(std::move(v)) {}
  Extended(std::int64_t v) : value_(v) {}
  Extended(int v) : value_(v) {}
  Extended(std::size_t v) : value_(v) {}

  static Extended infinity() {
    Extended e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  const BigInt& value() const {
    if (infinite_) throw std::logic_error("value() on infinite Extended");
    return value_;
  }

  // Narrowing accessor for quantities known to be small.
  std::int64_t to_int64() const {
    const BigInt& v = value();
    if (v > BigInt(INT64_MAX) || v < BigInt(INT64_MIN))
      throw std::overflow_error("Extended value does not fit in int64");
    return static_cast<std::int64_t>(v);
  }

  bool fits_int64() const {
    return !infinite_ && value_ <= BigInt(INT64_MAX) && value_ >= BigInt(INT64_MIN);
  }

  std::string str() const { return infinite_ ? std::string("inf") : value_.str(); }

  friend bool operator==(const Extended& a, const Extended& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const Extended& a, const Extended& b) {
    if (a.infinite_ || b.infinite_) {
      if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
      return a.infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend Extended operator+(const Extended& a, const Extended& b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return Extended(a.value_ + b.value_);
  }
  friend Extended operator-(const Extended& a, const BigInt& b) {
    if (a.infinite_) return infinity();
    return Extended(a.value_ - b);
  }

  friend std::ostream& operator<<(std::ostream& os, const Extended& e) { return os << e.str(); }

 private:
  BigInt value_ = 0;
  bool infinite_ = false;
};

inline Extended ext_min(const Extended& a, const Extended& b) { return b < a ? b : a; }
inline Extended ext_max(const Extended& a, const Extended& b) { return a < b ? b : a; }

inline BigInt pow_big(const BigInt& base, unsigned exp) { return boost::multiprecision::pow(base, exp); }

}  // namespace zsk

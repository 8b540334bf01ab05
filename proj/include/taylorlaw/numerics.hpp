#pragma once

#include <cmath>
#include <cstddef>

namespace taylorlaw {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// x^k for k >= 0 by repeated squaring.
inline double ipow(double x, unsigned k) noexcept {
  double result = 1.0;
  while (k) {
    if (k & 1u) result *= x;
    x *= x;
    k >>= 1u;
  }
  return result;
}

inline bool is_small_integer(double p) noexcept {
  return p == std::floor(p) && p >= 0.0 && p <= 64.0;
}

// x^p, exact repeated multiplication for small integer p.
inline double power(double x, double p) noexcept {
  return is_small_integer(p) ? ipow(x, static_cast<unsigned>(p)) : std::pow(x, p);
}

}  // namespace taylorlaw

#pragma once

#include <cmath>

namespace singquad {

/// Running sum kept as an unevaluated pair hi + lo, updated with the
/// error-free TwoSum transform. Addition order is the caller's; two sums fed
/// the same terms in the same order are bitwise identical.
class CompensatedSum {
 public:
  CompensatedSum() = default;

  void add(double x) noexcept {
    const double s = hi_ + x;
    const double bp = s - hi_;
    const double err = (hi_ - (s - bp)) + (x - bp);
    hi_ = s;
    lo_ += err;
  }

  void add(const CompensatedSum& other) noexcept {
    add(other.hi_);
    add(other.lo_);
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  double hi() const noexcept { return hi_; }
  double lo() const noexcept { return lo_; }
  double value() const noexcept { return hi_ + lo_; }
  long double extended() const noexcept { return static_cast<long double>(hi_) + static_cast<long double>(lo_); }

 private:
  double hi_ = 0;
  double lo_ = 0;
};

}  // namespace singquad

#pragma once

#include <cmath>

namespace votelab {

/// Neumaier-compensated running sum. Every reduction in the library goes
/// through this so tolerances of 1e-12 hold for m in the millions.
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(double initial) : sum_(initial) {}

  constexpr void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  constexpr CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  constexpr double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

template <class Range>
double compensated_sum(const Range& values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

}  // namespace votelab

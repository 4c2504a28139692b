#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nlf {

/// Worker count used by data-parallel loops. Defaults to 1.
void set_threads(int n);
int threads();

/// Runs body(i) for i in [0, n). Results written to disjoint slots stay
/// deterministic regardless of worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      c_ += (sum_ - t) + x;
    else
      c_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

/// Order-fixed compensated sum of a span.
double compensated_sum(std::span<const double> values);

}  // namespace nlf

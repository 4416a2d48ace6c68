#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace growent {

/// Neumaier's variant of Kahan summation. Robust when the running sum is
/// smaller in magnitude than the incoming term.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  NeumaierSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(sum_i exp(x_i)); -inf for an empty span.
double log_sum_exp(std::span<const double> xs);

}  // namespace growent

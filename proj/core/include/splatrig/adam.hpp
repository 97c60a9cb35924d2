#pragma once

#include <cmath>
#include <vector>

#include "splatrig/common.hpp"

namespace splatrig {

/// Adam over a flat parameter vector (beta1 = 0.9, beta2 = 0.999 by default).
class Adam {
 public:
  explicit Adam(size_t n, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

  /// In-place update of params given grads; both must have the stored size.
  void step(double lr, double* params, const double* grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    for (size_t i = 0; i < m_.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
  }

  size_t size() const { return m_.size(); }

 private:
  double beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace splatrig

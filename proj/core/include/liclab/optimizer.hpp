#pragma once

#include <cstdint>
#include <vector>

#include "liclab/tensor.hpp"

namespace liclab {

/// Adaptive-moment gradient descent, beta = (0.9, 0.999), no weight decay.
class Adam {
 public:
  explicit Adam(std::vector<Tensor> params, float lr, float beta1 = 0.9f,
                float beta2 = 0.999f, float eps = 1e-8f);

  void step();
  void zero_grad();
  std::int64_t step_count() const { return t_; }
  float lr() const { return lr_; }
  void set_lr(float lr) { lr_ = lr; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<float>> m_, v_;
  float lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
};

}  // namespace liclab

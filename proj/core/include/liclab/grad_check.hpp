#pragma once

#include <functional>

#include "liclab/tensor.hpp"

namespace liclab {

struct GradCheckResult {
  float max_rel_error = 0.0f;
  // True when the graph contains a primitive whose stated gradient is a
  // surrogate (round_ste, sign, saturated clamp): the computed error is
  // still reported, but finite differences are not expected to agree.
  bool nonsmooth = false;
};

/// Compares the analytic gradient of the scalar-valued closure `f` at `x`
/// against central finite differences with step `h`. Returns the max over
/// coordinates of |analytic - central| / max(|analytic|, |central|, 1e-8).
/// `f` must be deterministic (verified by evaluating twice at `x`).
GradCheckResult finite_difference_check(
    const std::function<Tensor(const Tensor&)>& f, const Tensor& x, double h);

}  // namespace liclab

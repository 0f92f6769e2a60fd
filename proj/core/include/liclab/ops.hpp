#pragma once

#include "liclab/rng.hpp"
#include "liclab/tensor.hpp"

namespace liclab {

// Elementwise (same shape unless noted). Every op records its backward
// closure on the result node.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scalar_mul(const Tensor& a, float c);
Tensor scalar_add(const Tensor& a, float c);
Tensor clamp(const Tensor& a, float lo, float hi);
Tensor leaky_relu(const Tensor& a, float slope = 0.01f);
Tensor abs(const Tensor& a);
Tensor sign(const Tensor& a);  // sign(0) == 0; gradient is zero everywhere
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor log2(const Tensor& a);
Tensor round_ste(const Tensor& a);  // hard round forward, identity backward
Tensor add_uniform_noise(const Tensor& a, Rng& rng);  // U(-0.5, 0.5), identity grad

// Reductions (double accumulation, result carries Node::precise).
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor mse(const Tensor& a, const Tensor& b);  // mean squared error

// x: N×Ci×H×W, w: Co×Ci×kh×kw, b: Co. Zero padding.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int stride,
              int pad);
// x: N×Ci×H×W, w: Ci×Co×kh×kw, b: Co. Exact adjoint of conv2d.
Tensor conv_transpose2d(const Tensor& x, const Tensor& w, const Tensor& b,
                        int stride, int pad, int out_pad);

inline constexpr float kLikelihoodFloor = 1e-9f;

// Discrete probability mass CDF(y+0.5) - CDF(y-0.5), clamped to
// [kLikelihoodFloor, 1]. Analytic gradients for all inputs.
// Logistic with per-channel location/log-scale (mu, log_s shape {C},
// y shape N×C×H×W).
Tensor logistic_mass(const Tensor& y, const Tensor& mu, const Tensor& log_s);
// Zero-mean Gaussian, sigma elementwise (same shape as y), clamped below at
// sigma_min. Negative sigma input is an error.
Tensor gaussian_mass(const Tensor& y, const Tensor& sigma, float sigma_min);

}  // namespace liclab

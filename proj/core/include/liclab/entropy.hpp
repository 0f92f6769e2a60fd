#pragma once

#include <cstdint>
#include <vector>

#include "liclab/ops.hpp"
#include "liclab/tensor.hpp"

namespace liclab {

/// Learned per-channel logistic distribution for quantized latents.
struct FactorizedEntropyParams {
  Tensor mu;     // shape {C}
  Tensor log_s;  // shape {C}; scale = exp(log_s) > 0 by construction
};

struct GaussianConditionalParams {
  float sigma_min = 0.11f;
};

/// Probability mass of each quantized latent under the per-channel logistic:
/// CDF(y+0.5) - CDF(y-0.5), clamped to [1e-9, 1].
Tensor likelihood_factorized(const Tensor& y_hat,
                             const FactorizedEntropyParams& params);

/// Zero-mean Gaussian conditional mass with per-element scale, clamped below
/// at sigma_min. Negative sigma is an error (upstream must apply exp).
Tensor likelihood_gaussian(const Tensor& y_hat, const Tensor& sigma,
                           const GaussianConditionalParams& params = {});

/// Sum of -log2(p) over all likelihood tensors, divided by num_pixels.
Tensor bpp_from_likelihoods(const std::vector<Tensor>& likelihoods,
                            std::int64_t num_pixels);

}  // namespace liclab

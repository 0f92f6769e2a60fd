#include "liclab/entropy.hpp"

namespace liclab {

Tensor likelihood_factorized(const Tensor& y_hat,
                             const FactorizedEntropyParams& params) {
  ensure_finite(y_hat, "likelihood_factorized input");
  return logistic_mass(y_hat, params.mu, params.log_s);
}

Tensor likelihood_gaussian(const Tensor& y_hat, const Tensor& sigma,
                           const GaussianConditionalParams& params) {
  return gaussian_mass(y_hat, sigma, params.sigma_min);
}

Tensor bpp_from_likelihoods(const std::vector<Tensor>& likelihoods,
                            std::int64_t num_pixels) {
  if (num_pixels <= 0)
    throw Error("bpp_from_likelihoods: num_pixels must be > 0");
  if (likelihoods.empty())
    throw Error("bpp_from_likelihoods: no likelihood tensors");
  Tensor total;
  for (const auto& p : likelihoods) {
    for (float v : p.data())
      if (v <= 0.0f)
        throw Error("bpp_from_likelihoods: zero likelihood encountered");
    Tensor bits = sum(log2(p));
    total = total.defined() ? add(total, bits) : bits;
  }
  return scalar_mul(total, -1.0f / static_cast<float>(num_pixels));
}

}  // namespace liclab

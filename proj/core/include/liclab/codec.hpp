#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liclab/config.hpp"
#include "liclab/entropy.hpp"
#include "liclab/ops.hpp"
#include "liclab/rng.hpp"
#include "liclab/tensor.hpp"

namespace liclab {

enum class Variant { Factorized, ScaleHyperprior };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct Conv2dLayer {
  Tensor w, b;
  int stride = 1;
  int pad = 0;
};

struct Deconv2dLayer {
  Tensor w, b;
  int stride = 1;
  int pad = 0;
  int out_pad = 0;
};

/// Channel widths of the toy transforms. Defaults follow the desk-scale
/// architecture: 3 stride-2 conv layers 32/64/64 with kernel 5, mirrored
/// synthesis, 16 hyper channels.
struct CodecDims {
  int c1 = 32;
  int c2 = 64;
  int latent = 64;
  int hyper = 16;
};

struct CodecModel {
  Variant variant = Variant::Factorized;
  float lambda = 1000.0f;
  CodecDims dims;

  std::vector<Conv2dLayer> analysis;    // g_a: 3 convs, stride 2, kernel 5
  std::vector<Deconv2dLayer> synthesis; // g_s: mirror of g_a
  std::vector<Conv2dLayer> hyper_analysis;  // g_ha: stride 2 then stride 1
  Deconv2dLayer hyper_up;                   // g_hs upsampling stage
  Conv2dLayer hyper_out;                    // g_hs head, outputs log(sigma)
  FactorizedEntropyParams entropy_y;  // Factorized variant: prior on y
  FactorizedEntropyParams entropy_z;  // ScaleHyperprior: prior on z
  GaussianConditionalParams gaussian;

  static CodecModel create(Variant variant, float lambda, std::uint64_t seed,
                           CodecDims dims = {});

  std::vector<std::pair<std::string, Tensor*>> named_params();
  std::vector<Tensor> params();
  bool params_finite() const;
};

enum class Mode { Train, Eval };

struct ForwardResult {
  Tensor x_hat;                        // reconstruction, clamped to [0,1]
  Tensor y_hat;                        // quantized latent
  std::optional<Tensor> z_hat;         // hyper-latent, ScaleHyperprior only
  Tensor y_likelihoods;                // per-element masses in (0,1]
  std::optional<Tensor> z_likelihoods;
  Tensor bpp_tensor;                   // scalar, graph-connected
  double bpp = 0.0;
};

/// Runs the full codec. Train mode quantizes with additive uniform noise
/// (rng required); Eval mode rounds with straight-through gradients.
ForwardResult codec_forward(const CodecModel& model, const Tensor& x,
                            Mode mode, Rng* rng = nullptr);

/// bpp + lambda * MSE(x, x_hat), differentiable through the forward graph.
Tensor rd_loss(const Tensor& x, const ForwardResult& result, float lambda);

struct TrainLog {
  std::vector<double> train_loss;  // per epoch
  std::vector<double> val_loss;
  std::int64_t optimizer_steps = 0;
};

/// Baseline rate-distortion training over 1×3×P×P patches. Deterministic
/// for a fixed config seed. Throws on divergence, naming the epoch.
TrainLog train_baseline(CodecModel& model, const std::vector<Tensor>& patches,
                        const TrainingConfig& cfg);

/// Validation R-D loss over a patch set, Train-mode quantization, fixed seed.
double validation_loss(const CodecModel& model,
                       const std::vector<Tensor>& patches, float lambda,
                       std::uint64_t seed);

/// Stacks 1×3×H×W patches into one B×3×H×W leaf tensor.
Tensor stack_batch(const std::vector<Tensor>& patches, size_t first,
                   size_t count);

}  // namespace liclab

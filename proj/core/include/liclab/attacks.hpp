#pragma once

#include <functional>
#include <vector>

#include "liclab/codec.hpp"
#include "liclab/config.hpp"

namespace liclab {

struct AttackResult {
  Tensor x_adv;                        // in [0,1], within the L-inf budget
  std::vector<float> loss_trajectory;  // one entry per completed iteration
  int steps_taken = 0;
  float linf = 0.0f;          // achieved max |x_adv - x|
  bool zero_gradient = false; // gradient vanished everywhere at step 0
};

/// Scalar attack loss as a function of the candidate adversarial image.
/// The input leaf must require gradients; the returned tensor is the value
/// to MAXIMIZE.
using AttackLoss = std::function<Tensor(const Tensor& x_adv)>;

/// L2 loss between the reconstruction of x_adv and the ORIGINAL x
/// (mean-squared-error reduction). Codec runs in Eval mode so gradients
/// cross quantization via the straight-through estimator.
Tensor attack_loss_quality(const CodecModel& model, const Tensor& x_adv,
                           const Tensor& x);
/// Exactly the codec's Eval-mode bpp, including the hyper-latent term for
/// ScaleHyperprior models.
Tensor attack_loss_rate(const CodecModel& model, const Tensor& x_adv);

AttackLoss make_attack_loss(const CodecModel& model, const Tensor& x,
                            AttackTarget target);

/// Iterative FGSM: X' += step * sign(grad), stopping after max_steps or
/// before any step that would leave the L-inf ball (the budget is a hard
/// guarantee, unlike the break-after-exceeding formulation).
AttackResult fgsm_attack(const AttackLoss& loss, const Tensor& x,
                         const AttackConfig& cfg);
AttackResult fgsm_attack(const CodecModel& model, const Tensor& x,
                         const AttackConfig& cfg);

/// PGD: uniform random init in the epsilon-ball, then exactly max_steps
/// signed ascent steps with per-element projection back onto the ball and
/// a clamp to [0,1].
AttackResult pgd_attack(const AttackLoss& loss, const Tensor& x,
                        const AttackConfig& cfg);
AttackResult pgd_attack(const CodecModel& model, const Tensor& x,
                        const AttackConfig& cfg);

AttackResult run_attack(const CodecModel& model, const Tensor& x,
                        const AttackConfig& cfg);

/// Per-pixel max over channels of |d loss / d x|, normalized to [0,1] by the
/// map maximum (all-zero map when the gradient vanishes). Shape {H, W}.
Tensor gradient_heatmap(const CodecModel& model, const Tensor& x,
                        AttackTarget target);

}  // namespace liclab

#include "liclab/attacks.hpp"

#include <cmath>

namespace liclab {

namespace {

constexpr float kBudgetSlack = 1e-6f;

struct GradEval {
  double loss;
  std::vector<float> grad;
  bool all_zero;
};

GradEval eval_loss_grad(const AttackLoss& loss, const Tensor& x_cur) {
  Tensor leaf = x_cur.detach(true);
  Tensor out = loss(leaf);
  if (!out.is_scalar())
    throw Error("attack loss must be scalar, got " + shape_str(out.shape()));
  if (!std::isfinite(out.item()))
    throw Error("attack loss is non-finite");
  backward(out);
  GradEval g{out.item_precise(), leaf.grad(), true};
  for (float v : g.grad)
    if (v != 0.0f) {
      g.all_zero = false;
      break;
    }
  return g;
}

float linf_dist(const Tensor& a, const Tensor& b) {
  return max_abs_diff(a, b);
}

void check_image(const Tensor& x) {
  for (float v : x.data())
    if (!(v >= 0.0f && v <= 1.0f))
      throw Error("attack input must lie in [0,1]");
}

}  // namespace

Tensor attack_loss_quality(const CodecModel& model, const Tensor& x_adv,
                           const Tensor& x) {
  if (x_adv.shape() != x.shape())
    throw Error("attack_loss_quality: shape mismatch " +
                shape_str(x_adv.shape()) + " vs " + shape_str(x.shape()));
  ForwardResult fr = codec_forward(model, x_adv, Mode::Eval);
  return mse(fr.x_hat, x);
}

Tensor attack_loss_rate(const CodecModel& model, const Tensor& x_adv) {
  ForwardResult fr = codec_forward(model, x_adv, Mode::Eval);
  return fr.bpp_tensor;
}

AttackLoss make_attack_loss(const CodecModel& model, const Tensor& x,
                            AttackTarget target) {
  if (target == AttackTarget::Quality) {
    Tensor x_ref = x.detach(false);
    return [&model, x_ref](const Tensor& x_adv) {
      return attack_loss_quality(model, x_adv, x_ref);
    };
  }
  return [&model](const Tensor& x_adv) {
    return attack_loss_rate(model, x_adv);
  };
}

AttackResult fgsm_attack(const AttackLoss& loss, const Tensor& x,
                         const AttackConfig& cfg) {
  cfg.validate();
  if (cfg.method != AttackMethod::FGSM)
    throw Error("fgsm_attack: config method is not FGSM");
  check_image(x);

  AttackResult res;
  Tensor x_adv = x.detach(false);
  int t = 0;
  while (t < cfg.max_steps) {
    GradEval g = eval_loss_grad(loss, x_adv);
    res.loss_trajectory.push_back(static_cast<float>(g.loss));
    if (t == 0 && g.all_zero) res.zero_gradient = true;
    Tensor candidate = x_adv.detach(false);
    for (size_t i = 0; i < candidate.data().size(); ++i) {
      const float s =
          g.grad[i] > 0.0f ? 1.0f : (g.grad[i] < 0.0f ? -1.0f : 0.0f);
      candidate.data()[i] = std::min(
          1.0f, std::max(0.0f, candidate.data()[i] + cfg.step_size * s));
    }
    // Stop before a step that would leave the budget, so the stated epsilon
    // is a hard guarantee rather than break-after-exceeding. The slack covers
    // one float rounding of x + step so a full-budget step (step_size equal
    // to epsilon) is not rejected on arithmetic noise.
    if (linf_dist(candidate, x) > cfg.epsilon + kBudgetSlack) break;
    x_adv = candidate;
    ++t;
  }
  res.x_adv = x_adv;
  res.steps_taken = t;
  res.linf = linf_dist(x_adv, x);
  return res;
}

AttackResult pgd_attack(const AttackLoss& loss, const Tensor& x,
                        const AttackConfig& cfg) {
  cfg.validate();
  if (cfg.method != AttackMethod::PGD)
    throw Error("pgd_attack: config method is not PGD");
  check_image(x);

  Rng rng(cfg.seed);
  AttackResult res;
  Tensor x_adv = x.detach(false);
  for (auto& v : x_adv.data())
    v = std::min(1.0f,
                 std::max(0.0f, v + rng.uniform(-cfg.epsilon, cfg.epsilon)));

  for (int t = 0; t < cfg.max_steps; ++t) {
    GradEval g = eval_loss_grad(loss, x_adv);
    res.loss_trajectory.push_back(static_cast<float>(g.loss));
    if (t == 0 && g.all_zero) res.zero_gradient = true;
    for (size_t i = 0; i < x_adv.data().size(); ++i) {
      const float s =
          g.grad[i] > 0.0f ? 1.0f : (g.grad[i] < 0.0f ? -1.0f : 0.0f);
      float noise = x_adv.data()[i] + cfg.step_size * s - x.data()[i];
      noise = std::min(cfg.epsilon, std::max(-cfg.epsilon, noise));
      x_adv.data()[i] =
          std::min(1.0f, std::max(0.0f, x.data()[i] + noise));
    }
    res.steps_taken = t + 1;
  }
  res.x_adv = x_adv;
  res.linf = linf_dist(x_adv, x);
  return res;
}

AttackResult fgsm_attack(const CodecModel& model, const Tensor& x,
                         const AttackConfig& cfg) {
  return fgsm_attack(make_attack_loss(model, x, cfg.target), x, cfg);
}

AttackResult pgd_attack(const CodecModel& model, const Tensor& x,
                        const AttackConfig& cfg) {
  return pgd_attack(make_attack_loss(model, x, cfg.target), x, cfg);
}

AttackResult run_attack(const CodecModel& model, const Tensor& x,
                        const AttackConfig& cfg) {
  return cfg.method == AttackMethod::FGSM ? fgsm_attack(model, x, cfg)
                                          : pgd_attack(model, x, cfg);
}

Tensor gradient_heatmap(const CodecModel& model, const Tensor& x,
                        AttackTarget target) {
  if (x.shape().size() != 4 || x.shape()[0] != 1)
    throw Error("gradient_heatmap: expected a single 1×C×H×W image, got " +
                shape_str(x.shape()));
  const int C = x.shape()[1], H = x.shape()[2], W = x.shape()[3];
  AttackLoss loss = make_attack_loss(model, x, target);
  GradEval g = eval_loss_grad(loss, x);

  Tensor map = Tensor::zeros({H, W});
  float mx = 0.0f;
  for (int y = 0; y < H; ++y)
    for (int xx = 0; xx < W; ++xx) {
      float m = 0.0f;
      for (int c = 0; c < C; ++c)
        m = std::max(m, std::fabs(g.grad[(c * H + y) * W + xx]));
      map.data()[y * W + xx] = m;
      mx = std::max(mx, m);
    }
  if (mx > 0.0f)
    for (auto& v : map.data()) v /= mx;
  return map;
}

}  // namespace liclab

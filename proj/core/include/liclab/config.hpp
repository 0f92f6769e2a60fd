#pragma once

#include <cstdint>

#include "liclab/tensor.hpp"

namespace liclab {

enum class AttackMethod { FGSM, PGD };
enum class AttackTarget { Quality, Rate };

struct AttackConfig {
  AttackMethod method = AttackMethod::PGD;
  AttackTarget target = AttackTarget::Quality;
  float epsilon = 0.03f;   // L-inf budget, [0,1] pixel scale
  float step_size = 0.01f;
  int max_steps = 40;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(step_size > 0.0f && step_size <= epsilon && epsilon <= 1.0f))
      throw Error("AttackConfig: need 0 < step_size <= epsilon <= 1");
    if (max_steps < 1) throw Error("AttackConfig: max_steps must be >= 1");
  }

  static AttackConfig fgsm_defaults() {
    AttackConfig c;
    c.method = AttackMethod::FGSM;
    c.step_size = 1e-4f;
    c.epsilon = 7.0f / 255.0f;
    c.max_steps = 1000;
    return c;
  }

  static AttackConfig pgd_defaults() {
    AttackConfig c;
    c.method = AttackMethod::PGD;
    c.step_size = 0.01f;
    c.epsilon = 0.03f;
    c.max_steps = 40;
    return c;
  }
};

struct TrainingConfig {
  int batch_size = 16;
  float learning_rate = 2e-4f;
  int max_epochs = 200;
  int patch_size = 256;   // must be divisible by 8
  AttackConfig attack = AttackConfig::pgd_defaults();  // inner PGD for defense
  float lambda = 1000.0f;
  std::uint64_t seed = 1;
  bool early_stop = false;       // fixed-epoch run is the default
  int patience = 10;             // validation plateau patience when enabled
  int checkpoint_every = 0;      // 0 = no periodic checkpoints

  void validate() const {
    if (batch_size < 1) throw Error("TrainingConfig: batch_size must be >= 1");
    if (patch_size % 8 != 0)
      throw Error("TrainingConfig: patch_size must be divisible by 8");
    if (max_epochs < 0) throw Error("TrainingConfig: max_epochs must be >= 0");
  }
};

}  // namespace liclab

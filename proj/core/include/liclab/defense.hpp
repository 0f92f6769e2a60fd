#pragma once

#include <filesystem>
#include <vector>

#include "liclab/attacks.hpp"
#include "liclab/codec.hpp"
#include "liclab/metrics.hpp"

namespace liclab {

struct DefenseReport {
  double rd_cost_clean_pre = 0.0, rd_cost_clean_post = 0.0;
  double rd_cost_adv_pre = 0.0, rd_cost_adv_post = 0.0;
  // psnr_change (Quality target) or bpp_change (Rate target), mean.
  double attack_effect_pre = 0.0, attack_effect_post = 0.0;
  double finetuning_effect_clean = 0.0;  // rd_cost_change on clean images
  double finetuning_effect_adv = 0.0;    // rd_cost_change on adversarial
};

struct RobustnessSummary {
  std::vector<EvalRecord> records;
  double mean_bpp_change = 0.0;
  double mean_psnr_change = 0.0;
  double mean_msssim_change = 0.0;
  double mean_rd_cost_orig = 0.0;
  double mean_rd_cost_adv = 0.0;
};

/// Attacks every test image with the configured attack and aggregates all
/// metrics. R-D costs use Eval-mode bpp and distortion measured against the
/// original image, matching the PSNR convention.
RobustnessSummary evaluate_robustness(const CodecModel& model,
                                      const std::vector<Tensor>& test_set,
                                      const AttackConfig& attack_cfg,
                                      float lambda);

/// PGD adversarial training: per minibatch, one optimizer step on the clean
/// batch, then one on a PGD-generated adversarial batch (dataset
/// augmentation, not replacement). Returns the report comparing attacked
/// metrics before and after finetuning on the held-out split.
DefenseReport pgd_train(CodecModel& model, const std::vector<Tensor>& patches,
                        const TrainingConfig& cfg,
                        TrainLog* log_out = nullptr);

void write_defense_csv(const DefenseReport& report, const std::string& target,
                       const std::filesystem::path& path);

}  // namespace liclab

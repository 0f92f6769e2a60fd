#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "liclab/tensor.hpp"

namespace liclab {

/// Peak signal-to-noise ratio of [0,1]-scaled images, in dB.
/// Returns +infinity when the images are identical.
double psnr(const Tensor& x, const Tensor& x_hat);

/// Multi-scale structural similarity: 11×11 Gaussian window sigma 1.5,
/// K1=0.01, K2=0.03, up to 5 scales with weights
/// (0.0448, 0.2856, 0.3001, 0.2363, 0.1333). When min(H,W) < 176 the scale
/// count is reduced to what fits an 11-px window and the used weights are
/// renormalized. Channels are scored independently and averaged.
double ms_ssim(const Tensor& x, const Tensor& x_hat);

struct MetricTriple {
  double bpp = 0.0;
  double psnr = 0.0;
  double msssim = 0.0;
};

struct ChangeTriple {
  double bpp_change = 0.0;     // ratio adv/orig
  double psnr_change = 0.0;    // signed relative change
  double msssim_change = 0.0;  // signed relative change
};

ChangeTriple change_metrics(const MetricTriple& orig, const MetricTriple& adv);

/// (cost_post - cost_pre) / cost_pre; cost_pre must be positive.
double rd_cost_change(double cost_pre, double cost_post);

struct EvalRecord {
  std::string image_id;
  double bpp_orig = 0.0, bpp_adv = 0.0;
  double psnr_orig = 0.0, psnr_adv = 0.0;  // both against the ORIGINAL image
  double msssim_orig = 0.0, msssim_adv = 0.0;
  double bpp_change = 0.0;
  double psnr_change = 0.0, msssim_change = 0.0;
  double rd_cost_orig = 0.0, rd_cost_adv = 0.0;
};

/// Run context attached to every CSV row so reports can group records.
struct RunContext {
  std::string method;   // fgsm|pgd
  std::string target;   // quality|rate
  std::string variant;  // factorized|hyperprior
  double lambda = 0.0;
};

extern const char* const kEvalCsvHeader;

void write_eval_csv(const std::vector<EvalRecord>& records,
                    const RunContext& ctx, const std::filesystem::path& path);
std::vector<std::pair<RunContext, EvalRecord>> read_eval_csv(
    const std::filesystem::path& path);

}  // namespace liclab

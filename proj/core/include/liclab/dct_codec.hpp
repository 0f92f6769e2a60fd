#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "liclab/attacks.hpp"
#include "liclab/codec.hpp"

namespace liclab {

/// Intra-only 8×8 block-DCT proxy for a conventional codec. Q follows the
/// H.26x convention: quantization step = 2^((Q-4)/6) on the 0..255 pixel
/// scale, flat base matrix.
struct DctCodecConfig {
  int q = 20;  // 1..51

  void validate() const {
    if (q < 1 || q > 51) throw Error("DctCodecConfig: Q must be in [1, 51]");
  }
  double step() const { return std::exp2((q - 4) / 6.0); }
};

struct DctResult {
  Tensor x_hat;      // reconstruction in [0,1]
  double bpp = 0.0;  // order-0 entropy of the quantized coefficient stream
};

DctResult dct_encode_decode(const Tensor& x, const DctCodecConfig& cfg);

// Orthonormal 2-D DCT-II of one 8×8 block (row-major), exposed for tests.
std::array<double, 64> dct8x8_forward(const std::array<double, 64>& block);
std::array<double, 64> dct8x8_inverse(const std::array<double, 64>& coeffs);

struct TransferCell {
  double psnr = 0.0;
  double bpp = 0.0;
};

/// Mean (PSNR, bpp) over the test set for origin/adversary × {LIC, DCT}.
struct TransferTable {
  TransferCell lic_origin, lic_adversary;
  TransferCell dct_origin, dct_adversary;
};

/// One-step-FGSM transfer experiment: craft adversaries against the LIC
/// model, then encode originals and adversaries with both codecs.
TransferTable transfer_attack_eval(const CodecModel& lic_model,
                                   const std::vector<Tensor>& test_set,
                                   const AttackConfig& fgsm_cfg,
                                   const DctCodecConfig& dct_cfg);

void write_transfer_csv(const TransferTable& table, const std::string& target,
                        const std::filesystem::path& path);

}  // namespace liclab

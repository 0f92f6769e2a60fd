#include "liclab/dct_codec.hpp"

#include <cmath>
#include <unordered_map>

#include "liclab/csv.hpp"
#include "liclab/metrics.hpp"

namespace liclab {

namespace {

// Orthonormal DCT-II basis: B[k][n] = c(k) cos((2n+1)k pi / 16).
const std::array<std::array<double, 8>, 8>& dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, 8>, 8> b{};
    for (int k = 0; k < 8; ++k) {
      const double c = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int n = 0; n < 8; ++n)
        b[k][n] = c * std::cos((2 * n + 1) * k * M_PI / 16.0);
    }
    return b;
  }();
  return basis;
}

}  // namespace

std::array<double, 64> dct8x8_forward(const std::array<double, 64>& block) {
  const auto& B = dct_basis();
  std::array<double, 64> tmp{}, out{};
  for (int k = 0; k < 8; ++k)       // rows
    for (int x = 0; x < 8; ++x) {
      double acc = 0.0;
      for (int n = 0; n < 8; ++n) acc += B[k][n] * block[n * 8 + x];
      tmp[k * 8 + x] = acc;
    }
  for (int y = 0; y < 8; ++y)       // columns
    for (int k = 0; k < 8; ++k) {
      double acc = 0.0;
      for (int n = 0; n < 8; ++n) acc += B[k][n] * tmp[y * 8 + n];
      out[y * 8 + k] = acc;
    }
  return out;
}

std::array<double, 64> dct8x8_inverse(const std::array<double, 64>& coeffs) {
  const auto& B = dct_basis();
  std::array<double, 64> tmp{}, out{};
  // coeffs[k][l]: k = row frequency, l = column frequency.
  for (int k = 0; k < 8; ++k)
    for (int m = 0; m < 8; ++m) {
      double acc = 0.0;
      for (int l = 0; l < 8; ++l) acc += B[l][m] * coeffs[k * 8 + l];
      tmp[k * 8 + m] = acc;
    }
  for (int n = 0; n < 8; ++n)
    for (int m = 0; m < 8; ++m) {
      double acc = 0.0;
      for (int k = 0; k < 8; ++k) acc += B[k][n] * tmp[k * 8 + m];
      out[n * 8 + m] = acc;
    }
  return out;
}

DctResult dct_encode_decode(const Tensor& x, const DctCodecConfig& cfg) {
  cfg.validate();
  if (x.shape().size() != 4 || x.shape()[0] != 1)
    throw Error("dct_encode_decode: expected 1×C×H×W image, got " +
                shape_str(x.shape()));
  const int C = x.shape()[1], H = x.shape()[2], W = x.shape()[3];
  if (H % 8 != 0 || W % 8 != 0)
    throw Error("dct_encode_decode: dims " + std::to_string(H) + "×" +
                std::to_string(W) + " not divisible by 8");

  const double step = cfg.step();
  DctResult res;
  res.x_hat = Tensor::zeros(x.shape());
  std::unordered_map<long, long> hist;
  long total_symbols = 0;

  for (int c = 0; c < C; ++c) {
    const float* src = x.data().data() + static_cast<std::ptrdiff_t>(c) * H * W;
    float* dst =
        res.x_hat.data().data() + static_cast<std::ptrdiff_t>(c) * H * W;
    for (int by = 0; by < H; by += 8)
      for (int bx = 0; bx < W; bx += 8) {
        std::array<double, 64> block;
        for (int y = 0; y < 8; ++y)
          for (int xx = 0; xx < 8; ++xx)
            block[y * 8 + xx] =
                src[(by + y) * W + bx + xx] * 255.0 - 128.0;
        auto coeffs = dct8x8_forward(block);
        for (auto& v : coeffs) {
          const long q = std::lround(v / step);
          ++hist[q];
          ++total_symbols;
          v = static_cast<double>(q) * step;
        }
        auto rec = dct8x8_inverse(coeffs);
        for (int y = 0; y < 8; ++y)
          for (int xx = 0; xx < 8; ++xx) {
            const double v = (rec[y * 8 + xx] + 128.0) / 255.0;
            dst[(by + y) * W + bx + xx] =
                static_cast<float>(std::min(1.0, std::max(0.0, v)));
          }
      }
  }

  double entropy = 0.0;  // bits per symbol
  for (const auto& [sym, count] : hist) {
    const double p = static_cast<double>(count) / total_symbols;
    entropy -= p * std::log2(p);
  }
  // One coefficient per pixel per channel.
  res.bpp = entropy * C;
  return res;
}

TransferTable transfer_attack_eval(const CodecModel& lic_model,
                                   const std::vector<Tensor>& test_set,
                                   const AttackConfig& fgsm_cfg,
                                   const DctCodecConfig& dct_cfg) {
  if (fgsm_cfg.max_steps != 1)
    throw Error("transfer_attack_eval: one-step FGSM required (max_steps=1)");
  if (test_set.empty()) throw Error("transfer_attack_eval: empty test set");

  TransferTable t;
  for (const auto& x : test_set) {
    AttackResult atk = fgsm_attack(lic_model, x, fgsm_cfg);

    ForwardResult lic_o = codec_forward(lic_model, x, Mode::Eval);
    ForwardResult lic_a = codec_forward(lic_model, atk.x_adv, Mode::Eval);
    t.lic_origin.psnr += psnr(x, lic_o.x_hat);
    t.lic_origin.bpp += lic_o.bpp;
    t.lic_adversary.psnr += psnr(x, lic_a.x_hat);
    t.lic_adversary.bpp += lic_a.bpp;

    DctResult dct_o = dct_encode_decode(x, dct_cfg);
    DctResult dct_a = dct_encode_decode(atk.x_adv, dct_cfg);
    t.dct_origin.psnr += psnr(x, dct_o.x_hat);
    t.dct_origin.bpp += dct_o.bpp;
    t.dct_adversary.psnr += psnr(x, dct_a.x_hat);
    t.dct_adversary.bpp += dct_a.bpp;
  }
  const double n = static_cast<double>(test_set.size());
  for (TransferCell* c : {&t.lic_origin, &t.lic_adversary, &t.dct_origin,
                          &t.dct_adversary}) {
    c->psnr /= n;
    c->bpp /= n;
  }
  return t;
}

void write_transfer_csv(const TransferTable& table, const std::string& target,
                        const std::filesystem::path& path) {
  CsvWriter w(path);
  w.write_row({"target,codec,row,psnr,bpp"});
  auto row = [&](const char* codec, const char* which,
                 const TransferCell& c) {
    w.write_row({target, codec, which, fmt_float(c.psnr), fmt_float(c.bpp)});
  };
  row("lic", "origin", table.lic_origin);
  row("lic", "adversary", table.lic_adversary);
  row("dct", "origin", table.dct_origin);
  row("dct", "adversary", table.dct_adversary);
}

}  // namespace liclab

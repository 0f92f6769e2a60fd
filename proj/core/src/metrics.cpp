#include "liclab/metrics.hpp"

#include <cmath>
#include <limits>

#include "liclab/csv.hpp"

namespace liclab {

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01, kK2 = 0.03;
const double kMsWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

std::vector<double> gaussian_kernel() {
  std::vector<double> k(kWin);
  double s = 0.0;
  for (int i = 0; i < kWin; ++i) {
    double d = i - (kWin - 1) / 2.0;
    k[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    s += k[i];
  }
  for (auto& v : k) v /= s;
  return k;
}

// Separable valid-mode Gaussian blur: (H,W) -> (H-10, W-10).
std::vector<double> blur(const std::vector<double>& img, int H, int W) {
  static const std::vector<double> k = gaussian_kernel();
  const int Wo = W - kWin + 1, Ho = H - kWin + 1;
  std::vector<double> tmp(static_cast<size_t>(H) * Wo);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < Wo; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWin; ++i) acc += k[i] * img[y * W + x + i];
      tmp[y * Wo + x] = acc;
    }
  std::vector<double> out(static_cast<size_t>(Ho) * Wo);
  for (int y = 0; y < Ho; ++y)
    for (int x = 0; x < Wo; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWin; ++i) acc += k[i] * tmp[(y + i) * Wo + x];
      out[y * Wo + x] = acc;
    }
  return out;
}

struct SsimPair {
  double ssim;
  double cs;
};

SsimPair ssim_scale(const std::vector<double>& a, const std::vector<double>& b,
                    int H, int W) {
  const double C1 = kK1 * kK1, C2 = kK2 * kK2;
  const size_t n = a.size();
  std::vector<double> aa(n), bb(n), ab(n);
  for (size_t i = 0; i < n; ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  auto mu1 = blur(a, H, W), mu2 = blur(b, H, W);
  auto m11 = blur(aa, H, W), m22 = blur(bb, H, W), m12 = blur(ab, H, W);
  double ssim_acc = 0.0, cs_acc = 0.0;
  for (size_t i = 0; i < mu1.size(); ++i) {
    const double s1 = m11[i] - mu1[i] * mu1[i];
    const double s2 = m22[i] - mu2[i] * mu2[i];
    const double s12 = m12[i] - mu1[i] * mu2[i];
    const double l = (2.0 * mu1[i] * mu2[i] + C1) /
                     (mu1[i] * mu1[i] + mu2[i] * mu2[i] + C1);
    const double cs = (2.0 * s12 + C2) / (s1 + s2 + C2);
    ssim_acc += l * cs;
    cs_acc += cs;
  }
  const double m = static_cast<double>(mu1.size());
  return {ssim_acc / m, cs_acc / m};
}

void downsample2(std::vector<double>& img, int& H, int& W) {
  const int Ho = H / 2, Wo = W / 2;
  std::vector<double> out(static_cast<size_t>(Ho) * Wo);
  for (int y = 0; y < Ho; ++y)
    for (int x = 0; x < Wo; ++x)
      out[y * Wo + x] = 0.25 * (img[(2 * y) * W + 2 * x] +
                                img[(2 * y) * W + 2 * x + 1] +
                                img[(2 * y + 1) * W + 2 * x] +
                                img[(2 * y + 1) * W + 2 * x + 1]);
  img = std::move(out);
  H = Ho;
  W = Wo;
}

void check_image_pair(const char* op, const Tensor& x, const Tensor& xh) {
  if (x.shape() != xh.shape())
    throw Error(std::string(op) + ": shape mismatch " + shape_str(x.shape()) +
                " vs " + shape_str(xh.shape()));
  if (x.shape().size() != 4)
    throw Error(std::string(op) + ": expected N×C×H×W images, got " +
                shape_str(x.shape()));
}

}  // namespace

double psnr(const Tensor& x, const Tensor& x_hat) {
  check_image_pair("psnr", x, x_hat);
  double acc = 0.0;
  for (size_t i = 0; i < x.data().size(); ++i) {
    const double d = static_cast<double>(x.data()[i]) - x_hat.data()[i];
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(x.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

double ms_ssim(const Tensor& x, const Tensor& x_hat) {
  check_image_pair("ms_ssim", x, x_hat);
  const int N = x.shape()[0], C = x.shape()[1], H = x.shape()[2],
            W = x.shape()[3];
  if (N != 1) throw Error("ms_ssim: expected a single image (N=1)");
  if (H < kWin || W < kWin)
    throw Error("ms_ssim: image smaller than the 11×11 window");

  int levels = 1;
  {
    int h = H, w = W;
    while (levels < 5 && h / 2 >= kWin && w / 2 >= kWin) {
      ++levels;
      h /= 2;
      w /= 2;
    }
  }
  double wsum = 0.0;
  for (int l = 0; l < levels; ++l) wsum += kMsWeights[l];

  double result = 0.0;
  for (int c = 0; c < C; ++c) {
    std::vector<double> a(static_cast<size_t>(H) * W),
        b(static_cast<size_t>(H) * W);
    const float* px = x.data().data() + static_cast<std::ptrdiff_t>(c) * H * W;
    const float* ph =
        x_hat.data().data() + static_cast<std::ptrdiff_t>(c) * H * W;
    for (size_t i = 0; i < a.size(); ++i) {
      a[i] = px[i];
      b[i] = ph[i];
    }
    int h = H, w = W;
    double value = 1.0;
    for (int l = 0; l < levels; ++l) {
      SsimPair p = ssim_scale(a, b, h, w);
      const double weight = kMsWeights[l] / wsum;
      const double term = (l == levels - 1) ? p.ssim : p.cs;
      value *= std::pow(std::max(term, 0.0), weight);
      if (l + 1 < levels) {
        int hb = h, wb = w;
        downsample2(a, h, w);
        downsample2(b, hb, wb);
      }
    }
    result += value;
  }
  return result / C;
}

ChangeTriple change_metrics(const MetricTriple& orig,
                            const MetricTriple& adv) {
  if (orig.bpp <= 0.0) throw Error("change_metrics: orig.bpp must be > 0");
  if (!std::isfinite(orig.psnr) || orig.psnr <= 0.0)
    throw Error("change_metrics: orig.psnr must be finite and > 0");
  if (!std::isfinite(adv.psnr))
    throw Error("change_metrics: adv.psnr must be finite");
  if (orig.msssim == 0.0)
    throw Error("change_metrics: orig.msssim must be nonzero");
  ChangeTriple c;
  c.bpp_change = adv.bpp / orig.bpp;
  c.psnr_change = (adv.psnr - orig.psnr) / orig.psnr;
  c.msssim_change = (adv.msssim - orig.msssim) / orig.msssim;
  return c;
}

double rd_cost_change(double cost_pre, double cost_post) {
  if (cost_pre <= 0.0)
    throw Error("rd_cost_change: cost_pre must be > 0");
  return (cost_post - cost_pre) / cost_pre;
}

const char* const kEvalCsvHeader =
    "method,target,variant,lambda,image_id,bpp_orig,bpp_adv,psnr_orig,"
    "psnr_adv,msssim_orig,msssim_adv,bpp_change,psnr_change,msssim_change,"
    "rd_cost_orig,rd_cost_adv";

void write_eval_csv(const std::vector<EvalRecord>& records,
                    const RunContext& ctx, const std::filesystem::path& path) {
  if (records.empty()) throw Error("write_eval_csv: no records");
  CsvWriter w(path);
  w.write_row({kEvalCsvHeader});
  for (const auto& r : records) {
    w.write_row({ctx.method, ctx.target, ctx.variant, fmt_float(ctx.lambda),
                 r.image_id, fmt_float(r.bpp_orig), fmt_float(r.bpp_adv),
                 fmt_float(r.psnr_orig), fmt_float(r.psnr_adv),
                 fmt_float(r.msssim_orig), fmt_float(r.msssim_adv),
                 fmt_float(r.bpp_change), fmt_float(r.psnr_change),
                 fmt_float(r.msssim_change), fmt_float(r.rd_cost_orig),
                 fmt_float(r.rd_cost_adv)});
  }
}

std::vector<std::pair<RunContext, EvalRecord>> read_eval_csv(
    const std::filesystem::path& path) {
  auto rows = read_csv(path);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "method")
    throw Error("not an eval CSV: " + path.string());
  std::vector<std::pair<RunContext, EvalRecord>> out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& c = rows[i];
    if (c.size() != 16)
      throw Error("bad eval CSV row in " + path.string());
    RunContext ctx{c[0], c[1], c[2], std::stod(c[3])};
    EvalRecord r;
    r.image_id = c[4];
    r.bpp_orig = std::stod(c[5]);
    r.bpp_adv = std::stod(c[6]);
    r.psnr_orig = std::stod(c[7]);
    r.psnr_adv = std::stod(c[8]);
    r.msssim_orig = std::stod(c[9]);
    r.msssim_adv = std::stod(c[10]);
    r.bpp_change = std::stod(c[11]);
    r.psnr_change = std::stod(c[12]);
    r.msssim_change = std::stod(c[13]);
    r.rd_cost_orig = std::stod(c[14]);
    r.rd_cost_adv = std::stod(c[15]);
    out.emplace_back(std::move(ctx), std::move(r));
  }
  return out;
}

}  // namespace liclab

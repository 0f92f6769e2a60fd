#include "liclab/codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "liclab/optimizer.hpp"

namespace liclab {

namespace {

constexpr float kLReluSlope = 0.01f;

Tensor he_uniform(Shape shape, int fan_in, Rng& rng) {
  const float limit = std::sqrt(6.0f / static_cast<float>(fan_in));
  Tensor t = Tensor::zeros(shape, true);
  for (auto& v : t.data()) v = rng.uniform(-limit, limit);
  return t;
}

Conv2dLayer make_conv(int ci, int co, int k, int stride, int pad, Rng& rng) {
  Conv2dLayer l;
  l.w = he_uniform({co, ci, k, k}, ci * k * k, rng);
  l.b = Tensor::zeros({co}, true);
  l.stride = stride;
  l.pad = pad;
  return l;
}

Deconv2dLayer make_deconv(int ci, int co, int k, int stride, int pad,
                          int out_pad, Rng& rng) {
  Deconv2dLayer l;
  l.w = he_uniform({ci, co, k, k}, ci * k * k, rng);
  l.b = Tensor::zeros({co}, true);
  l.stride = stride;
  l.pad = pad;
  l.out_pad = out_pad;
  return l;
}

Tensor apply(const Conv2dLayer& l, const Tensor& x) {
  return conv2d(x, l.w, l.b, l.stride, l.pad);
}

Tensor apply(const Deconv2dLayer& l, const Tensor& x) {
  return conv_transpose2d(x, l.w, l.b, l.stride, l.pad, l.out_pad);
}

}  // namespace

std::string variant_name(Variant v) {
  return v == Variant::Factorized ? "factorized" : "hyperprior";
}

Variant variant_from_name(const std::string& name) {
  if (name == "factorized") return Variant::Factorized;
  if (name == "hyperprior") return Variant::ScaleHyperprior;
  throw Error("unknown codec variant '" + name +
              "' (expected factorized|hyperprior)");
}

CodecModel CodecModel::create(Variant variant, float lambda,
                              std::uint64_t seed, CodecDims dims) {
  if (lambda <= 0.0f) throw Error("CodecModel: lambda must be > 0");
  CodecModel m;
  m.variant = variant;
  m.lambda = lambda;
  m.dims = dims;
  Rng rng(seed * 2654435761u + 17u);

  m.analysis.push_back(make_conv(3, dims.c1, 5, 2, 2, rng));
  m.analysis.push_back(make_conv(dims.c1, dims.c2, 5, 2, 2, rng));
  m.analysis.push_back(make_conv(dims.c2, dims.latent, 5, 2, 2, rng));
  m.synthesis.push_back(make_deconv(dims.latent, dims.c2, 5, 2, 2, 1, rng));
  m.synthesis.push_back(make_deconv(dims.c2, dims.c1, 5, 2, 2, 1, rng));
  m.synthesis.push_back(make_deconv(dims.c1, 3, 5, 2, 2, 1, rng));

  if (variant == Variant::Factorized) {
    m.entropy_y.mu = Tensor::zeros({dims.latent}, true);
    m.entropy_y.log_s = Tensor::zeros({dims.latent}, true);
  } else {
    m.hyper_analysis.push_back(make_conv(dims.latent, dims.hyper, 3, 2, 1, rng));
    m.hyper_analysis.push_back(make_conv(dims.hyper, dims.hyper, 3, 1, 1, rng));
    m.hyper_up = make_deconv(dims.hyper, dims.c1, 3, 2, 1, 1, rng);
    m.hyper_out = make_conv(dims.c1, dims.latent, 3, 1, 1, rng);
    m.entropy_z.mu = Tensor::zeros({dims.hyper}, true);
    m.entropy_z.log_s = Tensor::zeros({dims.hyper}, true);
  }
  return m;
}

std::vector<std::pair<std::string, Tensor*>> CodecModel::named_params() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (size_t i = 0; i < analysis.size(); ++i) {
    out.emplace_back("g_a." + std::to_string(i) + ".w", &analysis[i].w);
    out.emplace_back("g_a." + std::to_string(i) + ".b", &analysis[i].b);
  }
  for (size_t i = 0; i < synthesis.size(); ++i) {
    out.emplace_back("g_s." + std::to_string(i) + ".w", &synthesis[i].w);
    out.emplace_back("g_s." + std::to_string(i) + ".b", &synthesis[i].b);
  }
  if (variant == Variant::Factorized) {
    out.emplace_back("entropy_y.mu", &entropy_y.mu);
    out.emplace_back("entropy_y.log_s", &entropy_y.log_s);
  } else {
    for (size_t i = 0; i < hyper_analysis.size(); ++i) {
      out.emplace_back("g_ha." + std::to_string(i) + ".w",
                       &hyper_analysis[i].w);
      out.emplace_back("g_ha." + std::to_string(i) + ".b",
                       &hyper_analysis[i].b);
    }
    out.emplace_back("g_hs.up.w", &hyper_up.w);
    out.emplace_back("g_hs.up.b", &hyper_up.b);
    out.emplace_back("g_hs.out.w", &hyper_out.w);
    out.emplace_back("g_hs.out.b", &hyper_out.b);
    out.emplace_back("entropy_z.mu", &entropy_z.mu);
    out.emplace_back("entropy_z.log_s", &entropy_z.log_s);
  }
  return out;
}

std::vector<Tensor> CodecModel::params() {
  std::vector<Tensor> out;
  for (auto& [name, t] : named_params()) out.push_back(*t);
  return out;
}

bool CodecModel::params_finite() const {
  auto& self = const_cast<CodecModel&>(*this);
  for (auto& [name, t] : self.named_params())
    if (!all_finite(*t)) return false;
  return true;
}

ForwardResult codec_forward(const CodecModel& model, const Tensor& x,
                            Mode mode, Rng* rng) {
  if (x.shape().size() != 4 || x.shape()[1] != 3)
    throw Error("codec_forward: expected N×3×H×W input, got " +
                shape_str(x.shape()));
  const int N = x.shape()[0], H = x.shape()[2], W = x.shape()[3];
  if (H % 8 != 0 || W % 8 != 0)
    throw Error("codec_forward: spatial dims " + std::to_string(H) + "×" +
                std::to_string(W) +
                " not divisible by 8; pad the input before encoding");
  if (mode == Mode::Train && rng == nullptr)
    throw Error("codec_forward: Train mode needs an Rng for noise quantization");
  ensure_finite(x, "codec_forward input");

  auto quantize = [&](const Tensor& t) {
    return mode == Mode::Train ? add_uniform_noise(t, *rng) : round_ste(t);
  };

  Tensor y = apply(model.analysis[0], x);
  y = leaky_relu(y, kLReluSlope);
  y = apply(model.analysis[1], y);
  y = leaky_relu(y, kLReluSlope);
  y = apply(model.analysis[2], y);
  ensure_finite(y, "analysis transform output");

  ForwardResult res;
  res.y_hat = quantize(y);

  std::vector<Tensor> likelihoods;
  if (model.variant == Variant::Factorized) {
    res.y_likelihoods = likelihood_factorized(res.y_hat, model.entropy_y);
    likelihoods.push_back(res.y_likelihoods);
  } else {
    Tensor z = apply(model.hyper_analysis[0], abs(y));
    z = leaky_relu(z, kLReluSlope);
    z = apply(model.hyper_analysis[1], z);
    ensure_finite(z, "hyper-analysis output");
    Tensor z_hat = quantize(z);
    Tensor s = apply(model.hyper_up, z_hat);
    s = leaky_relu(s, kLReluSlope);
    s = apply(model.hyper_out, s);
    Tensor sigma = exp(s);
    ensure_finite(sigma, "hyper-synthesis sigma");
    res.z_hat = z_hat;
    res.y_likelihoods =
        likelihood_gaussian(res.y_hat, sigma, model.gaussian);
    res.z_likelihoods = likelihood_factorized(z_hat, model.entropy_z);
    likelihoods.push_back(res.y_likelihoods);
    likelihoods.push_back(*res.z_likelihoods);
  }

  Tensor xh = apply(model.synthesis[0], res.y_hat);
  xh = leaky_relu(xh, kLReluSlope);
  xh = apply(model.synthesis[1], xh);
  xh = leaky_relu(xh, kLReluSlope);
  xh = apply(model.synthesis[2], xh);
  ensure_finite(xh, "synthesis transform output");
  res.x_hat = clamp(xh, 0.0f, 1.0f);

  res.bpp_tensor = bpp_from_likelihoods(
      likelihoods, static_cast<std::int64_t>(N) * H * W);
  res.bpp = res.bpp_tensor.item_precise();
  return res;
}

Tensor rd_loss(const Tensor& x, const ForwardResult& result, float lambda) {
  if (lambda <= 0.0f) throw Error("rd_loss: lambda must be > 0");
  if (x.shape() != result.x_hat.shape())
    throw Error("rd_loss: shape mismatch " + shape_str(x.shape()) + " vs " +
                shape_str(result.x_hat.shape()));
  return add(result.bpp_tensor, scalar_mul(mse(x, result.x_hat), lambda));
}

Tensor stack_batch(const std::vector<Tensor>& patches, size_t first,
                   size_t count) {
  if (count == 0) throw Error("stack_batch: empty batch");
  const Shape& s = patches[first].shape();
  Tensor batch = Tensor::zeros(
      {static_cast<int>(count), s[1], s[2], s[3]}, false);
  const size_t per = patches[first].data().size();
  for (size_t i = 0; i < count; ++i) {
    const auto& src = patches[first + i];
    if (src.shape() != s)
      throw Error("stack_batch: mismatched patch shapes " + shape_str(s) +
                  " vs " + shape_str(src.shape()));
    std::copy(src.data().begin(), src.data().end(),
              batch.data().begin() + static_cast<std::ptrdiff_t>(i * per));
  }
  return batch;
}

double validation_loss(const CodecModel& model,
                       const std::vector<Tensor>& patches, float lambda,
                       std::uint64_t seed) {
  if (patches.empty()) throw Error("validation_loss: empty patch set");
  Rng rng(seed);
  double acc = 0.0;
  for (const auto& p : patches) {
    ForwardResult fr = codec_forward(model, p, Mode::Train, &rng);
    acc += rd_loss(p, fr, lambda).item_precise();
  }
  return acc / static_cast<double>(patches.size());
}

TrainLog train_baseline(CodecModel& model, const std::vector<Tensor>& patches,
                        const TrainingConfig& cfg) {
  cfg.validate();
  if (patches.empty()) throw Error("train_baseline: empty dataset");

  // Hold out 10% (at least one patch) for validation, fixed by seed.
  std::vector<size_t> order(patches.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(cfg.seed ^ 0x5eedULL);
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[split_rng.uniform_int(0, static_cast<int>(i) - 1)]);
  size_t n_val = std::max<size_t>(1, patches.size() / 10);
  if (n_val >= patches.size()) n_val = patches.size() > 1 ? 1 : 0;
  std::vector<Tensor> val, train;
  for (size_t i = 0; i < order.size(); ++i)
    (i < n_val ? val : train).push_back(patches[order[i]]);
  if (train.empty()) {
    train = patches;
    val = patches;
  }

  Adam opt(model.params(), cfg.learning_rate);
  Rng rng(cfg.seed);
  TrainLog log;
  if (!val.empty())
    log.val_loss.push_back(validation_loss(model, val, cfg.lambda, cfg.seed));

  std::vector<size_t> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<Tensor> shuffled(train.size());

  double best_val = log.val_loss.empty() ? 0.0 : log.val_loss.back();
  int stale = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    for (size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[rng.uniform_int(0, static_cast<int>(i) - 1)]);
    for (size_t i = 0; i < idx.size(); ++i) shuffled[i] = train[idx[i]];

    double epoch_loss = 0.0;
    size_t batches = 0;
    for (size_t off = 0; off < shuffled.size();
         off += static_cast<size_t>(cfg.batch_size)) {
      const size_t count =
          std::min<size_t>(cfg.batch_size, shuffled.size() - off);
      Tensor batch = stack_batch(shuffled, off, count);
      ForwardResult fr = codec_forward(model, batch, Mode::Train, &rng);
      Tensor loss = rd_loss(batch, fr, cfg.lambda);
      if (!std::isfinite(loss.item()))
        throw Error("train_baseline: loss diverged (NaN) at epoch " +
                    std::to_string(epoch));
      opt.zero_grad();
      backward(loss);
      opt.step();
      epoch_loss += loss.item_precise();
      ++batches;
    }
    if (!model.params_finite())
      throw Error("train_baseline: non-finite parameters at epoch " +
                  std::to_string(epoch));
    log.train_loss.push_back(epoch_loss / static_cast<double>(batches));
    const double vl = validation_loss(model, val, cfg.lambda, cfg.seed);
    log.val_loss.push_back(vl);
    if (cfg.early_stop) {
      if (vl < best_val - 1e-6) {
        best_val = vl;
        stale = 0;
      } else if (++stale >= cfg.patience) {
        break;
      }
    }
  }
  log.optimizer_steps = opt.step_count();
  return log;
}

}  // namespace liclab

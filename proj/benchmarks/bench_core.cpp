#include <benchmark/benchmark.h>

#include "liclab/liclab.hpp"

using namespace liclab;

namespace {

Tensor random_image(int H, int W, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> d(static_cast<size_t>(3) * H * W);
  for (auto& v : d) v = rng.uniform(0.0f, 1.0f);
  return Tensor::from_data({1, 3, H, W}, std::move(d));
}

void BM_conv2d_forward(benchmark::State& state) {
  Rng rng(1);
  Tensor x = random_image(64, 64, 2);
  std::vector<float> wd(32 * 3 * 5 * 5);
  for (auto& v : wd) v = rng.uniform(-0.1f, 0.1f);
  Tensor w = Tensor::from_data({32, 3, 5, 5}, std::move(wd));
  Tensor b = Tensor::zeros({32});
  for (auto _ : state) {
    Tensor y = conv2d(x, w, b, 2, 2);
    benchmark::DoNotOptimize(y.data().data());
  }
}
BENCHMARK(BM_conv2d_forward);

void BM_conv2d_backward(benchmark::State& state) {
  Rng rng(1);
  std::vector<float> wd(32 * 3 * 5 * 5);
  for (auto& v : wd) v = rng.uniform(-0.1f, 0.1f);
  for (auto _ : state) {
    Tensor x = random_image(64, 64, 2);
    x.set_requires_grad(true);
    Tensor w = Tensor::from_data({32, 3, 5, 5}, wd, true);
    Tensor b = Tensor::zeros({32}, true);
    backward(sum(conv2d(x, w, b, 2, 2)));
    benchmark::DoNotOptimize(x.grad().data());
  }
}
BENCHMARK(BM_conv2d_backward);

void BM_codec_forward_eval(benchmark::State& state) {
  CodecModel model = CodecModel::create(
      state.range(0) == 0 ? Variant::Factorized : Variant::ScaleHyperprior,
      1000.0f, 3);
  Tensor x = random_image(64, 64, 4);
  for (auto _ : state) {
    ForwardResult r = codec_forward(model, x, Mode::Eval);
    benchmark::DoNotOptimize(r.bpp);
  }
}
BENCHMARK(BM_codec_forward_eval)->Arg(0)->Arg(1);

void BM_pgd_step(benchmark::State& state) {
  CodecModel model = CodecModel::create(Variant::Factorized, 1000.0f, 5);
  Tensor x = random_image(64, 64, 6);
  AttackConfig cfg = AttackConfig::pgd_defaults();
  cfg.max_steps = 1;
  for (auto _ : state) {
    AttackResult r = pgd_attack(model, x, cfg);
    benchmark::DoNotOptimize(r.linf);
  }
}
BENCHMARK(BM_pgd_step);

void BM_dct_encode(benchmark::State& state) {
  Tensor x = random_image(256, 256, 7);
  DctCodecConfig cfg{20};
  for (auto _ : state) {
    DctResult r = dct_encode_decode(x, cfg);
    benchmark::DoNotOptimize(r.bpp);
  }
}
BENCHMARK(BM_dct_encode);

void BM_ms_ssim(benchmark::State& state) {
  Tensor a = random_image(256, 256, 8);
  Tensor b = random_image(256, 256, 9);
  for (auto _ : state) benchmark::DoNotOptimize(ms_ssim(a, b));
}
BENCHMARK(BM_ms_ssim);

}  // namespace

BENCHMARK_MAIN();

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "liclab/liclab.hpp"

namespace testutil {

inline liclab::Tensor random_tensor(liclab::Shape shape, liclab::Rng& rng,
                                    float lo = -1.0f, float hi = 1.0f,
                                    bool requires_grad = false) {
  const auto n = liclab::shape_numel(shape);
  std::vector<float> data(static_cast<size_t>(n));
  for (auto& v : data) v = rng.uniform(lo, hi);
  return liclab::Tensor::from_data(std::move(shape), std::move(data),
                                   requires_grad);
}

/// Procedural stand-in for a natural photo: smooth gradients, a few
/// sinusoidal textures and mild seeded noise, values kept inside (0, 1).
inline liclab::Tensor synthetic_image(int H, int W, std::uint64_t seed) {
  liclab::Rng rng(seed * 7919u + 13u);
  const float fx = rng.uniform(1.5f, 4.0f);
  const float fy = rng.uniform(1.5f, 4.0f);
  const float phase = rng.uniform(0.0f, 6.28f);
  std::vector<float> data(static_cast<size_t>(3) * H * W);
  for (int c = 0; c < 3; ++c) {
    const float cshift = 0.1f * static_cast<float>(c);
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const float u = static_cast<float>(x) / W;
        const float v = static_cast<float>(y) / H;
        float val = 0.45f + 0.2f * u + 0.15f * v + cshift * (u - v);
        val += 0.12f * std::sin(6.2832f * (fx * u + fy * v) + phase + c);
        val += 0.05f * std::sin(6.2832f * (11.0f * u - 7.0f * v));
        val += rng.uniform(-0.02f, 0.02f);
        val = std::min(0.98f, std::max(0.02f, val));
        data[(static_cast<size_t>(c) * H + y) * W + x] = val;
      }
    }
  }
  return liclab::Tensor::from_data({1, 3, H, W}, std::move(data));
}

inline liclab::CodecDims tiny_dims() { return {4, 8, 8, 4}; }

inline std::filesystem::path fresh_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() /
           ("liclab_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testutil

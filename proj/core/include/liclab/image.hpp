#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "liclab/rng.hpp"
#include "liclab/tensor.hpp"

namespace liclab {

/// Decoded 8-bit RGB image as a 1×3×H×W tensor in [0,1].
struct ImageRecord {
  std::string id;  // filename stem
  Tensor pixels;
};

// PNG: 8-bit only, non-interlaced; palette/gray inputs are expanded to RGB,
// alpha is stripped, 16-bit files are rejected naming the file.
Tensor load_png(const std::filesystem::path& path);
void save_png_rgb(const Tensor& img, const std::filesystem::path& path);
void save_png_gray(const Tensor& map, const std::filesystem::path& path);

// Binary PPM (P6, maxval 255).
Tensor load_ppm(const std::filesystem::path& path);
void save_ppm(const Tensor& img, const std::filesystem::path& path);

struct DatasetLoadResult {
  std::vector<ImageRecord> images;  // sorted by filename
  std::vector<std::string> warnings;
};

/// Loads every .png/.ppm in `dir`. Unreadable files are skipped with a
/// warning; zero usable images is an error. Images below `min_dim` pixels
/// on either side are rejected with a warning.
DatasetLoadResult load_dataset(const std::filesystem::path& dir,
                               int min_dim = 64);

/// Seeded random crop, one patch per call. Image must be >= patch in both
/// dims (error otherwise).
Tensor random_patch(const Tensor& img, int patch, Rng& rng);

/// One seeded random patch per image per epoch; too-small images are
/// skipped and reported in `warnings`.
std::vector<Tensor> epoch_patches(const std::vector<ImageRecord>& images,
                                  int patch, Rng& rng,
                                  std::vector<std::string>* warnings = nullptr);

/// Center crop to the largest size divisible by 8 (test-set convention).
Tensor center_crop_mult8(const Tensor& img);

}  // namespace liclab

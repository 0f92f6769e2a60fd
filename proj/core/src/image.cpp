#include "liclab/image.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>

namespace liclab {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Tensor planes_from_interleaved(const std::vector<unsigned char>& rgb, int H,
                               int W) {
  Tensor img = Tensor::zeros({1, 3, H, W});
  for (int c = 0; c < 3; ++c) {
    float* dst = img.data().data() + static_cast<std::ptrdiff_t>(c) * H * W;
    for (int i = 0; i < H * W; ++i)
      dst[i] = static_cast<float>(rgb[i * 3 + c]) / 255.0f;
  }
  return img;
}

void check_rgb_image(const Tensor& img, const char* op) {
  if (img.shape().size() != 4 || img.shape()[0] != 1 || img.shape()[1] != 3)
    throw Error(std::string(op) + ": expected 1×3×H×W image, got " +
                shape_str(img.shape()));
}

unsigned char to_byte(float v) {
  const float c = std::min(1.0f, std::max(0.0f, v));
  return static_cast<unsigned char>(std::lround(c * 255.0f));
}

}  // namespace

Tensor load_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw Error("cannot open " + path.string());

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("libpng init failed for " + path.string());
  }
  std::vector<unsigned char> rgb;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("not a valid PNG file: " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  const int interlace = png_get_interlace_type(png, info);
  if (bit_depth == 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("16-bit PNG not supported: " + path.string());
  }
  if (interlace != PNG_INTERLACE_NONE) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("interlaced PNG not supported: " + path.string());
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (bit_depth < 8) png_set_packing(png);
  png_read_update_info(png, info);

  const int H = static_cast<int>(png_get_image_height(png, info));
  const int W = static_cast<int>(png_get_image_width(png, info));
  rgb.resize(static_cast<size_t>(H) * W * 3);
  rows.resize(H);
  for (int y = 0; y < H; ++y)
    rows[y] = rgb.data() + static_cast<size_t>(y) * W * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return planes_from_interleaved(rgb, H, W);
}

namespace {

void write_png(const unsigned char* data, int H, int W, int channels,
               const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error("cannot open for writing: " + path.string());
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error("libpng init failed for " + path.string());
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG write failed: " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, W, H, 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(H);
  for (int y = 0; y < H; ++y)
    rows[y] = const_cast<png_bytep>(data + static_cast<size_t>(y) * W * channels);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void save_png_rgb(const Tensor& img, const std::filesystem::path& path) {
  check_rgb_image(img, "save_png_rgb");
  const int H = img.shape()[2], W = img.shape()[3];
  std::vector<unsigned char> rgb(static_cast<size_t>(H) * W * 3);
  for (int c = 0; c < 3; ++c) {
    const float* src =
        img.data().data() + static_cast<std::ptrdiff_t>(c) * H * W;
    for (int i = 0; i < H * W; ++i) rgb[i * 3 + c] = to_byte(src[i]);
  }
  write_png(rgb.data(), H, W, 3, path);
}

void save_png_gray(const Tensor& map, const std::filesystem::path& path) {
  if (map.shape().size() != 2)
    throw Error("save_png_gray: expected H×W map, got " +
                shape_str(map.shape()));
  const int H = map.shape()[0], W = map.shape()[1];
  std::vector<unsigned char> gray(static_cast<size_t>(H) * W);
  for (int i = 0; i < H * W; ++i) gray[i] = to_byte(map.data()[i]);
  write_png(gray.data(), H, W, 1, path);
}

Tensor load_ppm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  auto next_token = [&]() -> std::string {
    std::string tok;
    while (is) {
      int c = is.get();
      if (c == '#') {
        while (is && is.get() != '\n') {
        }
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      if (c == EOF) break;
      tok.push_back(static_cast<char>(c));
    }
    return tok;
  };
  if (next_token() != "P6")
    throw Error("not a binary PPM (P6): " + path.string());
  const int W = std::stoi(next_token());
  const int H = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (maxval != 255)
    throw Error("PPM maxval must be 255 (8-bit): " + path.string());
  std::vector<unsigned char> rgb(static_cast<size_t>(H) * W * 3);
  is.read(reinterpret_cast<char*>(rgb.data()),
          static_cast<std::streamsize>(rgb.size()));
  if (!is) throw Error("truncated PPM: " + path.string());
  return planes_from_interleaved(rgb, H, W);
}

void save_ppm(const Tensor& img, const std::filesystem::path& path) {
  check_rgb_image(img, "save_ppm");
  const int H = img.shape()[2], W = img.shape()[3];
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path.string());
  os << "P6\n" << W << " " << H << "\n255\n";
  std::vector<unsigned char> rgb(static_cast<size_t>(H) * W * 3);
  for (int c = 0; c < 3; ++c) {
    const float* src =
        img.data().data() + static_cast<std::ptrdiff_t>(c) * H * W;
    for (int i = 0; i < H * W; ++i) rgb[i * 3 + c] = to_byte(src[i]);
  }
  os.write(reinterpret_cast<const char*>(rgb.data()),
           static_cast<std::streamsize>(rgb.size()));
}

DatasetLoadResult load_dataset(const std::filesystem::path& dir, int min_dim) {
  if (!std::filesystem::is_directory(dir))
    throw Error("dataset directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension().string();
    if (ext == ".png" || ext == ".ppm") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  DatasetLoadResult res;
  for (const auto& f : files) {
    try {
      Tensor img = f.extension() == ".png" ? load_png(f) : load_ppm(f);
      if (img.shape()[2] < min_dim || img.shape()[3] < min_dim) {
        res.warnings.push_back("skipped " + f.filename().string() +
                               ": smaller than " + std::to_string(min_dim) +
                               " px");
        continue;
      }
      res.images.push_back({f.stem().string(), std::move(img)});
    } catch (const Error& e) {
      res.warnings.push_back("skipped " + f.filename().string() + ": " +
                             e.what());
    }
  }
  if (res.images.empty())
    throw Error("no usable images in " + dir.string());
  return res;
}

Tensor random_patch(const Tensor& img, int patch, Rng& rng) {
  check_rgb_image(img, "random_patch");
  const int H = img.shape()[2], W = img.shape()[3];
  if (H < patch || W < patch)
    throw Error("random_patch: image " + std::to_string(H) + "×" +
                std::to_string(W) + " smaller than patch " +
                std::to_string(patch));
  const int oy = H == patch ? 0 : rng.uniform_int(0, H - patch);
  const int ox = W == patch ? 0 : rng.uniform_int(0, W - patch);
  Tensor out = Tensor::zeros({1, 3, patch, patch});
  for (int c = 0; c < 3; ++c) {
    const float* src =
        img.data().data() + static_cast<std::ptrdiff_t>(c) * H * W;
    float* dst =
        out.data().data() + static_cast<std::ptrdiff_t>(c) * patch * patch;
    for (int y = 0; y < patch; ++y)
      std::copy(src + (oy + y) * W + ox, src + (oy + y) * W + ox + patch,
                dst + y * patch);
  }
  return out;
}

std::vector<Tensor> epoch_patches(const std::vector<ImageRecord>& images,
                                  int patch, Rng& rng,
                                  std::vector<std::string>* warnings) {
  std::vector<Tensor> out;
  for (const auto& rec : images) {
    if (rec.pixels.shape()[2] < patch || rec.pixels.shape()[3] < patch) {
      if (warnings)
        warnings->push_back("skipped " + rec.id + ": smaller than patch " +
                            std::to_string(patch));
      continue;
    }
    out.push_back(random_patch(rec.pixels, patch, rng));
  }
  return out;
}

Tensor center_crop_mult8(const Tensor& img) {
  check_rgb_image(img, "center_crop_mult8");
  const int H = img.shape()[2], W = img.shape()[3];
  const int Hc = (H / 8) * 8, Wc = (W / 8) * 8;
  if (Hc < 8 || Wc < 8)
    throw Error("center_crop_mult8: image too small");
  if (Hc == H && Wc == W) return img.detach(false);
  const int oy = (H - Hc) / 2, ox = (W - Wc) / 2;
  Tensor out = Tensor::zeros({1, 3, Hc, Wc});
  for (int c = 0; c < 3; ++c) {
    const float* src =
        img.data().data() + static_cast<std::ptrdiff_t>(c) * H * W;
    float* dst = out.data().data() + static_cast<std::ptrdiff_t>(c) * Hc * Wc;
    for (int y = 0; y < Hc; ++y)
      std::copy(src + (oy + y) * W + ox, src + (oy + y) * W + ox + Wc,
                dst + y * Wc);
  }
  return out;
}

}  // namespace liclab

#include "liclab/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

namespace liclab {

namespace {

constexpr char kMagic[8] = {'L', 'I', 'C', 'L', 'A', 'B', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& is, const std::filesystem::path& path) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error("checkpoint truncated: " + path.string());
  return v;
}

}  // namespace

void save_model(const CodecModel& model, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open checkpoint for writing: " + path.string());
  os.write(kMagic, sizeof(kMagic));
  write_raw(os, kVersion);
  write_raw(os, static_cast<std::uint8_t>(model.variant));
  write_raw(os, model.lambda);
  write_raw(os, static_cast<std::int32_t>(model.dims.c1));
  write_raw(os, static_cast<std::int32_t>(model.dims.c2));
  write_raw(os, static_cast<std::int32_t>(model.dims.latent));
  write_raw(os, static_cast<std::int32_t>(model.dims.hyper));

  auto& m = const_cast<CodecModel&>(model);
  auto named = m.named_params();
  write_raw(os, static_cast<std::uint32_t>(named.size()));
  for (auto& [name, t] : named) {
    write_raw(os, static_cast<std::uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_raw(os, static_cast<std::uint8_t>(t->shape().size()));
    for (int d : t->shape()) write_raw(os, static_cast<std::int32_t>(d));
    os.write(reinterpret_cast<const char*>(t->data().data()),
             static_cast<std::streamsize>(t->data().size() * sizeof(float)));
  }
  if (!os) throw Error("failed writing checkpoint: " + path.string());
}

CodecModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open checkpoint: " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error("bad checkpoint magic: " + path.string());
  const auto version = read_raw<std::uint32_t>(is, path);
  if (version != kVersion)
    throw Error("unsupported checkpoint version " + std::to_string(version) +
                " in " + path.string());
  const auto variant_tag = read_raw<std::uint8_t>(is, path);
  if (variant_tag > 1)
    throw Error("bad variant tag in checkpoint: " + path.string());
  const float lambda = read_raw<float>(is, path);
  CodecDims dims;
  dims.c1 = read_raw<std::int32_t>(is, path);
  dims.c2 = read_raw<std::int32_t>(is, path);
  dims.latent = read_raw<std::int32_t>(is, path);
  dims.hyper = read_raw<std::int32_t>(is, path);

  CodecModel model = CodecModel::create(
      static_cast<Variant>(variant_tag), lambda, /*seed=*/0, dims);

  std::map<std::string, Tensor*> by_name;
  for (auto& [name, t] : model.named_params()) by_name[name] = t;

  const auto count = read_raw<std::uint32_t>(is, path);
  if (count != by_name.size())
    throw Error("checkpoint manifest has " + std::to_string(count) +
                " tensors, model expects " + std::to_string(by_name.size()));
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = read_raw<std::uint16_t>(is, path);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    const auto ndim = read_raw<std::uint8_t>(is, path);
    Shape shape(ndim);
    for (auto& d : shape) d = read_raw<std::int32_t>(is, path);
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw Error("unknown tensor '" + name + "' in checkpoint " +
                  path.string());
    if (it->second->shape() != shape)
      throw Error("shape mismatch for '" + name + "': checkpoint has " +
                  shape_str(shape) + ", model expects " +
                  shape_str(it->second->shape()));
    is.read(reinterpret_cast<char*>(it->second->data().data()),
            static_cast<std::streamsize>(it->second->data().size() *
                                         sizeof(float)));
    if (!is) throw Error("checkpoint truncated: " + path.string());
  }
  return model;
}

}  // namespace liclab

#pragma once

#include <filesystem>

#include "liclab/codec.hpp"

namespace liclab {

/// Versioned binary container: 8-byte magic, format version, variant tag,
/// lambda, then a manifest of named parameter tensors (name, shape,
/// little-endian float32 data). Loading validates magic, version and the
/// full shape manifest.
void save_model(const CodecModel& model, const std::filesystem::path& path);
CodecModel load_model(const std::filesystem::path& path);

}  // namespace liclab

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "mojitalk/autodiff/tensor.hpp"

namespace mojitalk::ad {

inline constexpr int kCheckpointVersion = 1;

// Named parameters plus metadata for one model kind. On disk: a text header
// (magic + version, kind, metadata lines) followed by little-endian binary
// entries of (name, shape, row-major float64 values).
struct Checkpoint {
  std::string kind;
  std::map<std::string, std::string> metadata;
  ParameterStore params;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mojitalk::ad

#pragma once

#include <cstdint>
#include <filesystem>

#include "aiscene/trainer.hpp"

namespace aiscene {

struct Checkpoint {
  TrainState state;
  std::uint64_t config_hash = 0;
};

/// Little-endian layout: 8-byte magic "AISCKPT1", u64 config hash, u64 step,
/// u64 parameter count n, then n float64 student and n float64 teacher
/// parameters.
void save_checkpoint(const Checkpoint& checkpoint,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace aiscene

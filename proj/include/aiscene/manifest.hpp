#pragma once

#include <filesystem>
#include <map>

#include "aiscene/config.hpp"
#include "aiscene/dataset.hpp"
#include "aiscene/pools.hpp"

namespace aiscene {

/// Location of one scene's payload files.
struct SceneFiles {
  SceneId id;
  std::filesystem::path bin;
  std::optional<std::filesystem::path> label;
};

/// Dataset manifest (JSON): {"schema": ..., "scenes": [{"id", "bin",
/// "label"}], ...}. Paths are relative to the manifest's directory.
struct DatasetManifest {
  LabelSchema schema;
  std::vector<SceneFiles> scenes;
  Json extra = Json::object();  ///< free-form metadata, e.g. the synthetic spec
};

void save_dataset_manifest(const DatasetManifest& manifest,
                           const std::filesystem::path& path);
DatasetManifest load_dataset_manifest(const std::filesystem::path& path);

/// Loads every scene of a manifest into an unsplit Dataset.
Dataset load_dataset(const DatasetManifest& manifest);

/// Split manifest (JSON): {"dataset": path, "ratio", "seed", "labeled": [...],
/// "unlabeled": [...]}.
void save_split_manifest(const Dataset& split,
                         const std::filesystem::path& dataset_manifest,
                         double ratio, std::uint64_t seed,
                         const std::filesystem::path& path);
/// Loads the referenced dataset and applies the recorded split.
Dataset load_split(const std::filesystem::path& path,
                   DatasetManifest* manifest_out = nullptr);

/// Persistent pool manifest (JSON). Entries reference their source scene
/// by id and list the member point rows; payloads stay in the scene files.
void save_pool_manifest(const Pools& pools, const GridSpec& grid,
                        const PoolConfig& config,
                        const std::vector<SceneFiles>& sources,
                        const std::filesystem::path& path);

struct LoadedPools {
  Pools pools;
  GridSpec grid;
  PoolConfig config;
};
/// Materializes the entries by reloading the referenced scene files.
LoadedPools load_pool_manifest(const std::filesystem::path& path,
                               const LabelSchema& schema);

}  // namespace aiscene

#pragma once

#include <filesystem>
#include <optional>

#include "aiscene/provenance.hpp"
#include "aiscene/scene.hpp"
#include "aiscene/schema.hpp"

namespace aiscene {

/// Reads a SemanticKITTI-style sweep.
///
/// The point file holds little-endian float32 quadruples (x, y, z,
/// intensity). The optional label file holds one little-endian uint32 per
/// point; the low 16 bits are the raw semantic label (remapped through
/// `schema`), the high 16 bits an instance id that is discarded.
///
/// Throws FormatError on truncated files, ConsistencyError when the two
/// files disagree on the point count and IoError when a file cannot be read.
Scene load_scene_kitti(const std::filesystem::path& bin_path,
                       const std::optional<std::filesystem::path>& label_path,
                       const LabelSchema& schema, SceneId id = {});

/// Writes `scene` in the format read by load_scene_kitti. Feature column 0 is
/// stored as intensity (0 when the scene has no features); further feature
/// columns are not representable and raise PreconditionError. Labels are
/// written with zero instance bits. `label_path` must be given exactly when
/// the scene is labeled.
void save_scene(const Scene& scene, const std::filesystem::path& bin_path,
                const std::optional<std::filesystem::path>& label_path);

/// Provenance sidecar: three little-endian uint32 per point
/// (source scene id, source point row, branch tag).
void save_provenance(const Provenance& origin,
                     const std::filesystem::path& path);
Provenance load_provenance(const std::filesystem::path& path);

}  // namespace aiscene

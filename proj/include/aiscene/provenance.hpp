#pragma once

#include <cstdint>
#include <vector>

#include "aiscene/scene.hpp"

namespace aiscene {

/// Where an augmented point came from.
enum class Branch : std::uint32_t {
  base = 0,           ///< kept from the scene being augmented
  pool_patch = 1,     ///< substituted by MixPatch from a patch pool
  pool_instance = 2,  ///< appended by InsFill from an instance pool
};

struct PointOrigin {
  SceneId scene;
  std::uint32_t point = 0;  ///< row in the source scene as loaded
  Branch branch = Branch::base;

  friend bool operator==(const PointOrigin&, const PointOrigin&) = default;
};

using Provenance = std::vector<PointOrigin>;

/// A scene together with one PointOrigin per point.
struct AugmentedScene {
  Scene scene;
  Provenance origin;
};

/// Wraps a scene with identity provenance (every point is its own base).
AugmentedScene as_augmented(const Scene& scene);

}  // namespace aiscene

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "aiscene/scene.hpp"
#include "aiscene/types.hpp"

namespace aiscene {

struct Range {
  double min = -50.0;
  double max = 50.0;

  double width() const { return max - min; }
  friend bool operator==(const Range&, const Range&) = default;
};

/// Regular BEV partition into n x n cells over x_range x y_range.
struct GridSpec {
  int n = 18;
  Range x_range;
  Range y_range;

  /// Throws PreconditionError unless n >= 1 and both ranges are non-empty.
  void validate() const;

  std::uint32_t num_patches() const {
    return static_cast<std::uint32_t>(n) * static_cast<std::uint32_t>(n);
  }
  double cell_side_x() const { return x_range.width() / n; }
  double cell_side_y() const { return y_range.width() / n; }

  /// Cell of a BEV location, or nullopt outside the closed ranges. A value
  /// equal to the range maximum falls in the last cell.
  template <typename Scalar>
  std::optional<PatchIndex> cell_of(Scalar x, Scalar y) const {
    const auto col = axis_cell(static_cast<double>(x), x_range);
    const auto row = axis_cell(static_cast<double>(y), y_range);
    if (col < 0 || row < 0) return std::nullopt;
    return PatchIndex{static_cast<std::uint32_t>(row * n + col)};
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int axis_cell(double v, const Range& r) const {
    if (!(v >= r.min && v <= r.max)) return -1;
    // (v - min) * n / width is exact for the common round-number grids.
    const auto c = static_cast<int>(std::floor((v - r.min) * n / r.width()));
    return c >= n ? n - 1 : c;
  }
};

/// Cell of every point, -1 for points outside the grid.
std::vector<std::int32_t> assign_cells(const Scene& scene, const GridSpec& grid);

/// The points of one scene that fall in one BEV cell.
struct Patch {
  PatchIndex index;
  SceneId source_scene;
  Scene points;
  std::vector<std::uint32_t> source_point;  ///< row in the source scene
};

struct Patchification {
  std::vector<Patch> patches;  ///< non-empty cells, ascending index
  std::vector<std::uint32_t> out_of_range;  ///< rows outside the grid
};

/// Splits a scene into its non-empty BEV cell patches. Points outside the
/// grid are reported separately and left untouched.
Patchification patchify(const Scene& scene, const GridSpec& grid);

/// Same as patchify, but source_point entries are mapped through
/// `row_map` (used for erased scenes, whose rows index survivors).
Patchification patchify(const Scene& scene, const GridSpec& grid,
                        const std::vector<std::uint32_t>& row_map);

}  // namespace aiscene

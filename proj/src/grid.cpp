#include "aiscene/grid.hpp"

#include "aiscene/errors.hpp"

namespace aiscene {

void GridSpec::validate() const {
  if (n < 1) throw PreconditionError("grid: n must be >= 1");
  if (!(x_range.max > x_range.min) || !(y_range.max > y_range.min)) {
    throw PreconditionError("grid: range max must exceed min");
  }
}

std::vector<std::int32_t> assign_cells(const Scene& scene,
                                       const GridSpec& grid) {
  grid.validate();
  std::vector<std::int32_t> cells(static_cast<std::size_t>(scene.size()));
  const auto& c = scene.coords();
  for (Eigen::Index p = 0; p < scene.size(); ++p) {
    const auto cell = grid.cell_of(c(p, 0), c(p, 1));
    cells[static_cast<std::size_t>(p)] =
        cell ? static_cast<std::int32_t>(cell->value) : -1;
  }
  return cells;
}

Patchification patchify(const Scene& scene, const GridSpec& grid,
                        const std::vector<std::uint32_t>& row_map) {
  if (static_cast<Eigen::Index>(row_map.size()) != scene.size()) {
    throw ConsistencyError("patchify: row map does not match scene size");
  }
  const auto cells = assign_cells(scene, grid);
  std::vector<std::vector<std::uint32_t>> members(grid.num_patches());
  Patchification out;
  for (std::size_t p = 0; p < cells.size(); ++p) {
    if (cells[p] < 0) {
      out.out_of_range.push_back(static_cast<std::uint32_t>(p));
    } else {
      members[static_cast<std::size_t>(cells[p])].push_back(
          static_cast<std::uint32_t>(p));
    }
  }
  for (std::uint32_t j = 0; j < members.size(); ++j) {
    if (members[j].empty()) continue;
    SceneBuilder builder(scene.feature_dim(), scene.has_labels());
    builder.reserve(members[j].size());
    Patch patch;
    patch.index = PatchIndex{j};
    patch.source_scene = scene.id();
    patch.source_point.reserve(members[j].size());
    for (std::uint32_t p : members[j]) {
      builder.append(scene, p);
      patch.source_point.push_back(row_map[p]);
    }
    patch.points = std::move(builder).build(scene.id());
    out.patches.push_back(std::move(patch));
  }
  return out;
}

Patchification patchify(const Scene& scene, const GridSpec& grid) {
  std::vector<std::uint32_t> identity(static_cast<std::size_t>(scene.size()));
  for (std::size_t i = 0; i < identity.size(); ++i) {
    identity[i] = static_cast<std::uint32_t>(i);
  }
  return patchify(scene, grid, identity);
}

}  // namespace aiscene

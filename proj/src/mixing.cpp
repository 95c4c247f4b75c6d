#include "aiscene/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace aiscene {

AugmentedScene as_augmented(const Scene& scene) {
  AugmentedScene out{scene, {}};
  out.origin.reserve(static_cast<std::size_t>(scene.size()));
  for (Eigen::Index p = 0; p < scene.size(); ++p) {
    out.origin.push_back(
        {scene.id(), static_cast<std::uint32_t>(p), Branch::base});
  }
  return out;
}

AugmentedScene as_augmented(const ErasedScene& erased) {
  AugmentedScene out{erased.scene, {}};
  out.origin.reserve(erased.kept_index.size());
  for (std::uint32_t row : erased.kept_index) {
    out.origin.push_back({erased.scene.id(), row, Branch::base});
  }
  return out;
}

namespace {

void check_base(const AugmentedScene& base, const MixMask& mask,
                const GridSpec& grid) {
  grid.validate();
  if (mask.size() != grid.num_patches()) {
    throw ConsistencyError("mix: mask has " + std::to_string(mask.size()) +
                           " entries for " +
                           std::to_string(grid.num_patches()) + " patches");
  }
  if (!base.scene.has_labels()) {
    throw PreconditionError("mix: base scene must be labeled");
  }
  if (static_cast<Eigen::Index>(base.origin.size()) != base.scene.size()) {
    throw ConsistencyError("mix: provenance does not match scene size");
  }
}

// Replaces the patches flagged in `replace` that have pool entries.
AugmentedScene mix_patches(const AugmentedScene& base, const PatchPool& pool,
                           const std::vector<bool>& replace,
                           const GridSpec& grid, Rng& rng) {
  const std::uint32_t t = grid.num_patches();
  std::vector<const Patch*> chosen(t, nullptr);
  std::size_t extra = 0;
  for (std::uint32_t j = 0; j < t; ++j) {
    if (!replace[j]) continue;
    const auto entries = pool.at(PatchIndex{j});
    if (entries.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, entries.size() - 1);
    chosen[j] = &entries[pick(rng)];
    extra += static_cast<std::size_t>(chosen[j]->points.size());
  }

  const Scene& scene = base.scene;
  const auto cells = assign_cells(scene, grid);
  SceneBuilder builder(scene.feature_dim(), true);
  builder.reserve(static_cast<std::size_t>(scene.size()) + extra);
  AugmentedScene out;
  out.origin.reserve(static_cast<std::size_t>(scene.size()) + extra);
  for (Eigen::Index p = 0; p < scene.size(); ++p) {
    const auto cell = cells[static_cast<std::size_t>(p)];
    if (cell >= 0 && chosen[static_cast<std::size_t>(cell)]) continue;
    builder.append(scene, p);
    out.origin.push_back(base.origin[static_cast<std::size_t>(p)]);
  }
  for (std::uint32_t j = 0; j < t; ++j) {
    const Patch* patch = chosen[j];
    if (!patch) continue;
    for (Eigen::Index p = 0; p < patch->points.size(); ++p) {
      builder.append(patch->points, p);
      out.origin.push_back({patch->source_scene,
                            patch->source_point[static_cast<std::size_t>(p)],
                            Branch::pool_patch});
    }
  }
  out.scene = std::move(builder).build(scene.id());
  return out;
}

}  // namespace

std::size_t MixMask::replaced_count() const {
  return static_cast<std::size_t>(std::count(keep.begin(), keep.end(), false));
}

void MixConfig::validate() const {
  if (!(rho_mix >= 0.0 && rho_mix <= 1.0) || !(p_fill >= 0.0 && p_fill <= 1.0)) {
    throw PreconditionError("mix config: fractions must lie in [0, 1]");
  }
  if (context_radius && !(*context_radius > 0.0)) {
    throw PreconditionError("mix config: context_radius must be > 0");
  }
}

double MixConfig::resolved_context_radius(const GridSpec& grid) const {
  return context_radius.value_or(
      2.0 * std::max(grid.cell_side_x(), grid.cell_side_y()));
}

MixMask sample_mask(std::uint32_t num_patches, double rho_mix, Rng& rng) {
  if (num_patches < 1) throw PreconditionError("sample_mask: T must be >= 1");
  if (!(rho_mix >= 0.0 && rho_mix <= 1.0)) {
    throw PreconditionError("sample_mask: rho_mix must lie in [0, 1]");
  }
  const auto k = static_cast<std::uint32_t>(
      std::llround(rho_mix * static_cast<double>(num_patches)));
  std::vector<std::uint32_t> order(num_patches);
  std::iota(order.begin(), order.end(), 0u);
  MixMask mask{std::vector<bool>(num_patches, true)};
  for (std::uint32_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::uint32_t> pick(i, num_patches - 1);
    std::swap(order[i], order[pick(rng)]);
    mask.keep[order[i]] = false;
  }
  return mask;
}

AugmentedScene mix_patch_unlabeled(const AugmentedScene& base,
                                   const PatchPool& labeled_pool,
                                   const MixMask& mask, const GridSpec& grid,
                                   Rng& rng) {
  check_base(base, mask, grid);
  std::vector<bool> replace(mask.size());
  for (std::size_t j = 0; j < mask.size(); ++j) replace[j] = !mask.keep[j];
  return mix_patches(base, labeled_pool, replace, grid, rng);
}

AugmentedScene mix_patch_unlabeled(const ErasedScene& erased,
                                   const PatchPool& labeled_pool,
                                   const MixMask& mask, const GridSpec& grid,
                                   Rng& rng) {
  return mix_patch_unlabeled(as_augmented(erased), labeled_pool, mask, grid,
                             rng);
}

AugmentedScene mix_patch_labeled(const AugmentedScene& base,
                                 const PatchPool& pseudo_pool,
                                 const MixMask& mask, const GridSpec& grid,
                                 Rng& rng) {
  check_base(base, mask, grid);
  return mix_patches(base, pseudo_pool, mask.keep, grid, rng);
}

AugmentedScene mix_patch_labeled(const Scene& labeled,
                                 const PatchPool& pseudo_pool,
                                 const MixMask& mask, const GridSpec& grid,
                                 Rng& rng) {
  return mix_patch_labeled(as_augmented(labeled), pseudo_pool, mask, grid, rng);
}

std::vector<ThingGroup> thing_groups(const Scene& scene, const GridSpec& grid,
                                     const LabelSchema& schema) {
  if (!scene.has_labels()) {
    throw PreconditionError("thing_groups: scene must be labeled");
  }
  const auto cells = assign_cells(scene, grid);
  const auto& labels = scene.labels();
  std::map<std::pair<std::int32_t, ClassId>, Aabb> boxes;
  for (Eigen::Index p = 0; p < scene.size(); ++p) {
    const auto i = static_cast<std::size_t>(p);
    if (!schema.is_thing(labels[i])) continue;
    auto [it, fresh] =
        boxes.try_emplace({cells[i], labels[i]}, Aabb::empty_box());
    it->second.expand(scene.coords().row(p).transpose());
  }
  std::vector<ThingGroup> out;
  out.reserve(boxes.size());
  for (const auto& [key, box] : boxes) {
    out.push_back({key.second, key.first, box});
  }
  return out;
}

AugmentedScene ins_fill(const AugmentedScene& base, const InstancePool& pool,
                        const GridSpec& grid, const MixConfig& config,
                        const LabelSchema& schema, Rng& rng,
                        FillStats* stats) {
  config.validate();
  grid.validate();
  if (!base.scene.has_labels()) {
    throw PreconditionError("ins_fill: base scene must be labeled");
  }
  FillStats local;
  const std::uint32_t t = grid.num_patches();

  std::vector<Aabb> occupied;
  for (const auto& g : thing_groups(base.scene, grid, schema)) {
    occupied.push_back(g.box);
  }
  const BevRadiusIndex context(base.scene.coords(),
                               config.resolved_context_radius(grid));

  std::vector<const Instance*> accepted;
  std::size_t extra = 0;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::uint32_t j = 0; j < t && j < pool.num_indices(); ++j) {
    if (!(coin(rng) < config.p_fill)) continue;
    const auto entries = pool.at(PatchIndex{j});
    if (entries.empty()) continue;
    ++local.attempts;
    std::uniform_int_distribution<std::size_t> pick(0, entries.size() - 1);
    const Instance& cand = entries[pick(rng)];
    const Aabb box = compute_aabb(cand.points.coords());
    const bool overlaps =
        std::any_of(occupied.begin(), occupied.end(),
                    [&](const Aabb& o) { return aabb_intersects(box, o); });
    if (overlaps) {
      ++local.rejected_overlap;
      continue;
    }
    const auto c = box.center();
    if (context.count_within(c.x(), c.y()) < config.context_min_points) {
      ++local.rejected_context;
      continue;
    }
    occupied.push_back(box);
    accepted.push_back(&cand);
    extra += static_cast<std::size_t>(cand.points.size());
    ++local.filled;
  }
  if (stats) *stats = local;
  if (accepted.empty()) return base;

  const Scene& scene = base.scene;
  SceneBuilder builder(scene.feature_dim(), true);
  builder.reserve(static_cast<std::size_t>(scene.size()) + extra);
  AugmentedScene out;
  out.origin = base.origin;
  out.origin.reserve(out.origin.size() + extra);
  for (Eigen::Index p = 0; p < scene.size(); ++p) builder.append(scene, p);
  for (const Instance* inst : accepted) {
    for (Eigen::Index p = 0; p < inst->points.size(); ++p) {
      builder.append(inst->points, p, inst->class_id);
      out.origin.push_back({inst->source_scene,
                            inst->source_point[static_cast<std::size_t>(p)],
                            Branch::pool_instance});
    }
  }
  out.scene = std::move(builder).build(scene.id());
  return out;
}

AugmentedScene mix_and_fill(const AugmentedScene& base, const Pools& pools,
                            const GridSpec& grid, const MixConfig& config,
                            const LabelSchema& schema, std::uint64_t mask_seed,
                            bool mix, bool fill) {
  config.validate();
  Rng rng = derive_rng(mask_seed, 0);
  const MixMask mask = sample_mask(grid.num_patches(), config.rho_mix, rng);
  AugmentedScene out = base;
  if (mix) out = mix_patch_unlabeled(out, pools.patches, mask, grid, rng);
  if (fill) out = ins_fill(out, pools.instances, grid, config, schema, rng);
  return out;
}

BevRadiusIndex::BevRadiusIndex(const Scene::Coords& coords, double radius)
    : radius_(radius) {
  if (!(radius > 0.0)) throw PreconditionError("radius index: radius must be > 0");
  const Eigen::Index m = coords.rows();
  if (m == 0) {
    start_.assign(2, 0);
    return;
  }
  origin_x_ = coords.col(0).minCoeff();
  origin_y_ = coords.col(1).minCoeff();
  const double span_x = coords.col(0).maxCoeff() - origin_x_;
  const double span_y = coords.col(1).maxCoeff() - origin_y_;
  // Buckets are at least `radius` wide; very small radii over large scenes
  // get wider buckets rather than an unbounded table.
  constexpr double kMaxBuckets = 1024.0;
  cell_ = std::max({radius_, span_x / kMaxBuckets, span_y / kMaxBuckets});
  nx_ = static_cast<std::int64_t>(span_x / cell_) + 1;
  ny_ = static_cast<std::int64_t>(span_y / cell_) + 1;

  std::vector<std::int64_t> bucket(static_cast<std::size_t>(m));
  start_.assign(static_cast<std::size_t>(nx_ * ny_ + 1), 0);
  for (Eigen::Index p = 0; p < m; ++p) {
    const auto bx = std::min<std::int64_t>(
        nx_ - 1, static_cast<std::int64_t>((coords(p, 0) - origin_x_) / cell_));
    const auto by = std::min<std::int64_t>(
        ny_ - 1, static_cast<std::int64_t>((coords(p, 1) - origin_y_) / cell_));
    bucket[static_cast<std::size_t>(p)] = key(bx, by);
    ++start_[static_cast<std::size_t>(key(bx, by)) + 1];
  }
  std::partial_sum(start_.begin(), start_.end(), start_.begin());
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  xy_.resize(static_cast<std::size_t>(2 * m));
  for (Eigen::Index p = 0; p < m; ++p) {
    const auto slot = fill[static_cast<std::size_t>(bucket[static_cast<std::size_t>(p)])]++;
    xy_[2 * slot] = coords(p, 0);
    xy_[2 * slot + 1] = coords(p, 1);
  }
}

std::int64_t BevRadiusIndex::key(std::int64_t bx, std::int64_t by) const {
  return by * nx_ + bx;
}

std::size_t BevRadiusIndex::count_within(double x, double y) const {
  if (xy_.empty()) return 0;
  const double r2 = radius_ * radius_;
  auto lo = [&](double v, double o, std::int64_t n) {
    return std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((v - radius_ - o) / cell_)), 0,
        n - 1);
  };
  auto hi = [&](double v, double o, std::int64_t n) {
    return std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((v + radius_ - o) / cell_)), 0,
        n - 1);
  };
  std::size_t count = 0;
  for (std::int64_t by = lo(y, origin_y_, ny_); by <= hi(y, origin_y_, ny_); ++by) {
    for (std::int64_t bx = lo(x, origin_x_, nx_); bx <= hi(x, origin_x_, nx_); ++bx) {
      const auto k = static_cast<std::size_t>(key(bx, by));
      for (auto s = start_[k]; s < start_[k + 1]; ++s) {
        const double dx = xy_[2 * s] - x;
        const double dy = xy_[2 * s + 1] - y;
        if (dx * dx + dy * dy <= r2) ++count;
      }
    }
  }
  return count;
}

}  // namespace aiscene

#include "aiscene/pools.hpp"

#include <map>

#include "aiscene/errors.hpp"

namespace aiscene {

void PoolConfig::validate() const {
  if (tau_min < 1) throw PreconditionError("pools: tau_min must be >= 1");
}

std::vector<Instance> extract_instances(const Patch& patch,
                                        const LabelSchema& schema,
                                        std::size_t tau_min) {
  if (!patch.points.has_labels()) {
    throw PreconditionError("extract_instances: patch is unlabeled");
  }
  const auto& labels = patch.points.labels();
  std::map<ClassId, std::vector<Eigen::Index>> groups;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (schema.is_thing(labels[p])) {
      groups[labels[p]].push_back(static_cast<Eigen::Index>(p));
    }
  }
  std::vector<Instance> out;
  for (const auto& [cls, rows] : groups) {
    if (rows.size() < tau_min) continue;
    SceneBuilder builder(patch.points.feature_dim(), true);
    builder.reserve(rows.size());
    Instance inst;
    inst.class_id = cls;
    inst.index = patch.index;
    inst.source_scene = patch.source_scene;
    for (Eigen::Index r : rows) {
      builder.append(patch.points, r);
      inst.source_point.push_back(patch.source_point[static_cast<std::size_t>(r)]);
    }
    inst.points = std::move(builder).build(patch.source_scene);
    out.push_back(std::move(inst));
  }
  return out;
}

namespace {

class PoolAccumulator {
 public:
  PoolAccumulator(const GridSpec& grid, const PoolConfig& config,
                  const LabelSchema& schema, PoolScope scope)
      : grid_(grid),
        config_(config),
        schema_(schema),
        rng_(config.seed),
        pools_{PatchPool(grid.num_patches(), scope),
               InstancePool(grid.num_patches(), scope)} {
    grid.validate();
    config.validate();
  }

  void add(Patchification parts) {
    for (Patch& patch : parts.patches) {
      for (Instance& inst : extract_instances(patch, schema_, config_.tau_min)) {
        pools_.instances.insert(std::move(inst), config_.capacity_per_index,
                                rng_);
      }
      if (static_cast<std::size_t>(patch.points.size()) >= config_.tau_min) {
        pools_.patches.insert(std::move(patch), config_.capacity_per_index,
                              rng_);
      }
    }
  }

  Pools finish() && { return std::move(pools_); }

 private:
  const GridSpec& grid_;
  const PoolConfig& config_;
  const LabelSchema& schema_;
  Rng rng_;
  Pools pools_;
};

}  // namespace

Pools build_labeled_pools(std::span<const Scene* const> labeled_scenes,
                          const GridSpec& grid, const PoolConfig& config,
                          const LabelSchema& schema) {
  PoolAccumulator acc(grid, config, schema, PoolScope::persistent_labeled);
  for (const Scene* scene : labeled_scenes) {
    if (!scene->has_labels()) {
      throw PreconditionError("build_labeled_pools: scene " +
                              std::to_string(scene->id().value) +
                              " is unlabeled");
    }
    acc.add(patchify(*scene, grid));
  }
  return std::move(acc).finish();
}

Pools build_pseudo_pools(std::span<const ErasedScene> erased_scenes,
                         const GridSpec& grid, const PoolConfig& config,
                         const LabelSchema& schema) {
  PoolAccumulator acc(grid, config, schema, PoolScope::batch_pseudo);
  for (const ErasedScene& e : erased_scenes) {
    acc.add(patchify(e.scene, grid, e.kept_index));
  }
  return std::move(acc).finish();
}

Pools build_pseudo_pools(std::span<const Scene* const> scenes,
                         const GridSpec& grid, const PoolConfig& config,
                         const LabelSchema& schema) {
  PoolAccumulator acc(grid, config, schema, PoolScope::batch_pseudo);
  for (const Scene* scene : scenes) {
    if (!scene->has_labels()) {
      throw PreconditionError("build_pseudo_pools: scene is unlabeled");
    }
    acc.add(patchify(*scene, grid));
  }
  return std::move(acc).finish();
}

}  // namespace aiscene

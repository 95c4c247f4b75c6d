#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aiscene/aabb.hpp"
#include "aiscene/erasure.hpp"
#include "aiscene/grid.hpp"
#include "aiscene/pools.hpp"
#include "aiscene/provenance.hpp"
#include "aiscene/schema.hpp"

namespace aiscene {

/// Wraps an erased scene; origins point at rows of the pre-erasure scene.
AugmentedScene as_augmented(const ErasedScene& erased);

/// keep[j] == true: patch j of the base (unlabeled-branch) scene is kept.
struct MixMask {
  std::vector<bool> keep;

  std::size_t size() const { return keep.size(); }
  std::size_t replaced_count() const;
};

struct MixConfig {
  double rho_mix = 0.5;  ///< fraction of patches replaced in the unlabeled branch
  double p_fill = 0.5;   ///< per-index InsFill attempt probability
  std::optional<double> context_radius;  ///< BEV meters; default 2x cell side
  std::size_t context_min_points = 10;
  std::uint64_t seed = 0;

  void validate() const;
  double resolved_context_radius(const GridSpec& grid) const;
};

/// Marks exactly round(rho_mix * T) patches as replaced, chosen uniformly
/// without replacement (partial Fisher-Yates over 0..T-1).
MixMask sample_mask(std::uint32_t num_patches, double rho_mix, Rng& rng);

/// Unlabeled-branch MixPatch: patches where the mask is false are replaced
/// by a same-index patch drawn uniformly from the labeled pool. A replaced
/// index without pool entries keeps the base patch. Out-of-grid base points
/// are always kept. Base points keep their order; pool points follow in
/// ascending patch index. Throws ConsistencyError on a mask of wrong length.
AugmentedScene mix_patch_unlabeled(const AugmentedScene& base,
                                   const PatchPool& labeled_pool,
                                   const MixMask& mask, const GridSpec& grid,
                                   Rng& rng);
AugmentedScene mix_patch_unlabeled(const ErasedScene& erased,
                                   const PatchPool& labeled_pool,
                                   const MixMask& mask, const GridSpec& grid,
                                   Rng& rng);

/// Labeled-branch MixPatch with the same mask: replaces exactly the patches
/// the unlabeled branch kept, drawing from the batch pseudo pool.
AugmentedScene mix_patch_labeled(const AugmentedScene& base,
                                 const PatchPool& pseudo_pool,
                                 const MixMask& mask, const GridSpec& grid,
                                 Rng& rng);
AugmentedScene mix_patch_labeled(const Scene& labeled,
                                 const PatchPool& pseudo_pool,
                                 const MixMask& mask, const GridSpec& grid,
                                 Rng& rng);

/// Thing-class point groups of a labeled scene: one box per (cell, class),
/// with out-of-grid points grouped per class.
struct ThingGroup {
  ClassId class_id;
  std::int32_t cell = -1;
  Aabb box;
};
std::vector<ThingGroup> thing_groups(const Scene& scene, const GridSpec& grid,
                                     const LabelSchema& schema);

/// Outcome of one InsFill pass, for diagnostics.
struct FillStats {
  std::size_t attempts = 0;
  std::size_t filled = 0;
  std::size_t rejected_overlap = 0;
  std::size_t rejected_context = 0;
};

/// InsFill. For every patch index j in ascending order one uniform draw
/// decides (with probability p_fill) whether to attempt a fill; an attempt
/// picks a pool instance stored under j uniformly and appends its points at
/// their source coordinates, unless its box intersects the box of a
/// thing group already in the scene or of an instance filled earlier in
/// this pass, or fewer than context_min_points base points lie within
/// context_radius (BEV) of the box center. Failures are silent skips.
AugmentedScene ins_fill(const AugmentedScene& base, const InstancePool& pool,
                        const GridSpec& grid, const MixConfig& config,
                        const LabelSchema& schema, Rng& rng,
                        FillStats* stats = nullptr);

/// Offline augmentation of one labeled scene against persistent pools:
/// derives an engine from `mask_seed`, samples a mask with config.rho_mix,
/// then applies unlabeled-branch MixPatch (when `mix`) and InsFill (when
/// `fill`). Identical arguments give identical results.
AugmentedScene mix_and_fill(const AugmentedScene& base, const Pools& pools,
                            const GridSpec& grid, const MixConfig& config,
                            const LabelSchema& schema, std::uint64_t mask_seed,
                            bool mix = true, bool fill = true);

/// Counts points within a BEV radius (inclusive) of query locations,
/// bucketing points on a uniform grid.
class BevRadiusIndex {
 public:
  BevRadiusIndex(const Scene::Coords& coords, double radius);
  std::size_t count_within(double x, double y) const;

 private:
  std::int64_t key(std::int64_t bx, std::int64_t by) const;

  double radius_;
  double cell_ = 1.0;
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  std::int64_t nx_ = 1;
  std::int64_t ny_ = 1;
  std::vector<std::uint32_t> start_;  // bucket offsets into xy_
  std::vector<float> xy_;
};

}  // namespace aiscene

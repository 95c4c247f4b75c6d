#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aiscene/erasure.hpp"
#include "aiscene/grid.hpp"
#include "aiscene/schema.hpp"

namespace aiscene {

/// Patches or instances with fewer points are never pooled.
inline constexpr std::size_t kDefaultTauMin = 5;

/// All points of one thing class inside one patch.
struct Instance {
  ClassId class_id;
  PatchIndex index;
  SceneId source_scene;
  Scene points;
  std::vector<std::uint32_t> source_point;
};

enum class PoolScope { persistent_labeled, batch_pseudo };

struct PoolConfig {
  std::size_t tau_min = kDefaultTauMin;
  /// Per-index cap; once reached, later entries replace stored ones by
  /// reservoir sampling driven by `seed`.
  std::optional<std::size_t> capacity_per_index;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Entries keyed by patch index. Every stored entry reports the index it is
/// stored under.
template <typename Entry>
class IndexedPool {
 public:
  IndexedPool() = default;
  IndexedPool(std::uint32_t num_indices, PoolScope scope)
      : scope_(scope), entries_(num_indices), seen_(num_indices, 0) {}

  PoolScope scope() const { return scope_; }
  std::uint32_t num_indices() const {
    return static_cast<std::uint32_t>(entries_.size());
  }

  std::span<const Entry> at(PatchIndex j) const {
    if (j.value >= entries_.size()) return {};
    return entries_[j.value];
  }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.size();
    return n;
  }
  bool empty() const { return total_size() == 0; }

  /// Stores `entry` under entry.index. With a capacity this performs one
  /// step of reservoir sampling using `rng`.
  void insert(Entry entry, std::optional<std::size_t> capacity, Rng& rng) {
    auto& list = entries_.at(entry.index.value);
    auto& seen = seen_[entry.index.value];
    ++seen;
    if (!capacity || list.size() < *capacity) {
      list.push_back(std::move(entry));
      return;
    }
    if (*capacity == 0) return;
    std::uniform_int_distribution<std::uint64_t> pick(0, seen - 1);
    const auto slot = pick(rng);
    if (slot < *capacity) list[slot] = std::move(entry);
  }

  void clear() {
    for (auto& e : entries_) e.clear();
    std::fill(seen_.begin(), seen_.end(), 0);
  }

 private:
  PoolScope scope_ = PoolScope::persistent_labeled;
  std::vector<std::vector<Entry>> entries_;
  std::vector<std::uint64_t> seen_;
};

using PatchPool = IndexedPool<Patch>;
using InstancePool = IndexedPool<Instance>;

struct Pools {
  PatchPool patches;
  InstancePool instances;
};

/// One instance per thing class present in `patch` (all points of that
/// class), dropping groups with fewer than tau_min points.
std::vector<Instance> extract_instances(const Patch& patch,
                                        const LabelSchema& schema,
                                        std::size_t tau_min);

/// Persistent pools over the labeled training scenes. Throws
/// PreconditionError when a scene is unlabeled.
Pools build_labeled_pools(std::span<const Scene* const> labeled_scenes,
                          const GridSpec& grid, const PoolConfig& config,
                          const LabelSchema& schema);

/// Fresh batch-scoped pools over the current iteration's erased scenes.
/// Patch source points refer to rows of the original, pre-erasure scene.
Pools build_pseudo_pools(std::span<const ErasedScene> erased_scenes,
                         const GridSpec& grid, const PoolConfig& config,
                         const LabelSchema& schema);

/// Batch-scoped pools over pseudo-labeled (not erased) scenes.
Pools build_pseudo_pools(std::span<const Scene* const> scenes,
                         const GridSpec& grid, const PoolConfig& config,
                         const LabelSchema& schema);

}  // namespace aiscene

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "aiscene/scene.hpp"
#include "aiscene/schema.hpp"

namespace aiscene {

/// An ordered collection of scenes plus a labeled/unlabeled split.
///
/// Ground truth of unlabeled scenes stays inside the dataset: training code
/// reads scenes through training_scene(), which strips labels from
/// unlabeled entries, while evaluation_scene() exposes the full annotation.
class Dataset {
 public:
  using ScenePtr = std::shared_ptr<const Scene>;

  Dataset() = default;
  /// A dataset without a split: every scene counts as labeled when it
  /// carries labels, and as unlabeled otherwise.
  Dataset(std::vector<ScenePtr> scenes, LabelSchema schema);
  /// Throws PreconditionError when the sets overlap, reference missing
  /// scenes, or a labeled id refers to a scene without labels.
  Dataset(std::vector<ScenePtr> scenes, LabelSchema schema,
          std::vector<std::size_t> labeled_ids,
          std::vector<std::size_t> unlabeled_ids);

  std::size_t size() const { return scenes_.size(); }
  bool empty() const { return scenes_.empty(); }
  const LabelSchema& schema() const { return schema_; }
  const std::vector<std::size_t>& labeled_ids() const { return labeled_; }
  const std::vector<std::size_t>& unlabeled_ids() const { return unlabeled_; }
  bool is_labeled(std::size_t i) const;

  /// Training-facing view: labels are present only for labeled ids.
  const Scene& training_scene(std::size_t i) const;
  /// Full ground truth, for evaluation only.
  const Scene& evaluation_scene(std::size_t i) const;

  const std::vector<ScenePtr>& scenes() const { return scenes_; }

 private:
  std::vector<ScenePtr> scenes_;
  std::vector<ScenePtr> hidden_;  // label-stripped copies of unlabeled scenes
  LabelSchema schema_;
  std::vector<std::size_t> labeled_;
  std::vector<std::size_t> unlabeled_;
  std::vector<bool> labeled_mask_;
};

/// Samples ceil(labeled_ratio * N) scene indices uniformly without
/// replacement (std::shuffle of 0..N-1 under `seed`, first k kept, sorted);
/// the rest become unlabeled. Throws PreconditionError for an empty dataset,
/// a ratio outside (0, 1], or when a drawn scene has no labels.
Dataset split_dataset(const Dataset& dataset, double labeled_ratio,
                      std::uint64_t seed);

/// ceil(ratio * n) with a small tolerance against products like 0.1 * 30.
std::size_t labeled_count(double ratio, std::size_t n);

}  // namespace aiscene

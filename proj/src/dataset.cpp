#include "aiscene/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aiscene/errors.hpp"

namespace aiscene {

namespace {

std::vector<std::size_t> ids_where(const std::vector<Dataset::ScenePtr>& scenes,
                                   bool labeled) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    if (scenes[i]->has_labels() == labeled) out.push_back(i);
  }
  return out;
}

}  // namespace

Dataset::Dataset(std::vector<ScenePtr> scenes, LabelSchema schema)
    : Dataset(scenes, std::move(schema), ids_where(scenes, true),
              ids_where(scenes, false)) {}

Dataset::Dataset(std::vector<ScenePtr> scenes, LabelSchema schema,
                 std::vector<std::size_t> labeled_ids,
                 std::vector<std::size_t> unlabeled_ids)
    : scenes_(std::move(scenes)),
      schema_(std::move(schema)),
      labeled_(std::move(labeled_ids)),
      unlabeled_(std::move(unlabeled_ids)),
      labeled_mask_(scenes_.size(), false) {
  std::vector<bool> seen(scenes_.size(), false);
  auto claim = [&](std::size_t i) {
    if (i >= scenes_.size()) {
      throw PreconditionError("dataset: scene index " + std::to_string(i) +
                              " out of range");
    }
    if (seen[i]) {
      throw PreconditionError("dataset: scene " + std::to_string(i) +
                              " listed twice");
    }
    seen[i] = true;
  };
  for (std::size_t i : labeled_) {
    claim(i);
    if (!scenes_[i]->has_labels()) {
      throw PreconditionError("dataset: labeled scene " + std::to_string(i) +
                              " has no labels");
    }
    labeled_mask_[i] = true;
  }
  for (std::size_t i : unlabeled_) claim(i);

  hidden_.resize(scenes_.size());
  for (std::size_t i : unlabeled_) {
    hidden_[i] = scenes_[i]->has_labels()
                     ? std::make_shared<const Scene>(scenes_[i]->without_labels())
                     : scenes_[i];
  }
}

bool Dataset::is_labeled(std::size_t i) const {
  return i < labeled_mask_.size() && labeled_mask_[i];
}

const Scene& Dataset::training_scene(std::size_t i) const {
  if (i >= scenes_.size()) throw PreconditionError("dataset: index out of range");
  if (hidden_[i]) return *hidden_[i];
  return *scenes_[i];
}

const Scene& Dataset::evaluation_scene(std::size_t i) const {
  if (i >= scenes_.size()) throw PreconditionError("dataset: index out of range");
  return *scenes_[i];
}

std::size_t labeled_count(double ratio, std::size_t n) {
  const double k = std::ceil(ratio * static_cast<double>(n) - 1e-9);
  return std::min(n, static_cast<std::size_t>(std::max(0.0, k)));
}

Dataset split_dataset(const Dataset& dataset, double labeled_ratio,
                      std::uint64_t seed) {
  if (dataset.empty()) throw PreconditionError("split: empty dataset");
  if (!(labeled_ratio > 0.0 && labeled_ratio <= 1.0)) {
    throw PreconditionError("split: labeled_ratio must lie in (0, 1]");
  }
  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t k = labeled_count(labeled_ratio, n);
  std::vector<std::size_t> labeled(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<std::size_t> unlabeled(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  std::sort(labeled.begin(), labeled.end());
  std::sort(unlabeled.begin(), unlabeled.end());
  return Dataset(dataset.scenes(), dataset.schema(), std::move(labeled),
                 std::move(unlabeled));
}

}  // namespace aiscene

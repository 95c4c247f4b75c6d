#include "aiscene/scene.hpp"

#include <string>

#include "aiscene/errors.hpp"

namespace aiscene {

Scene::Scene(SceneId id, Coords coords, Features feats,
             std::optional<Labels> labels)
    : id_(id),
      coords_(std::move(coords)),
      feats_(std::move(feats)),
      labels_(std::move(labels)) {
  if (feats_.rows() != coords_.rows()) {
    // An m x 0 feature block is allowed to arrive as 0 x 0.
    if (feats_.size() == 0) {
      feats_.resize(coords_.rows(), feats_.cols());
    } else {
      throw ConsistencyError("scene: " + std::to_string(coords_.rows()) +
                             " coordinates but " +
                             std::to_string(feats_.rows()) + " feature rows");
    }
  }
  if (labels_ &&
      static_cast<Eigen::Index>(labels_->size()) != coords_.rows()) {
    throw ConsistencyError("scene: " + std::to_string(coords_.rows()) +
                           " coordinates but " +
                           std::to_string(labels_->size()) + " labels");
  }
  if (!coords_.allFinite()) {
    throw ValidationError("scene: non-finite coordinate");
  }
}

const Scene::Labels& Scene::labels() const {
  if (!labels_) throw PreconditionError("scene has no labels");
  return *labels_;
}

Scene Scene::without_labels() const {
  return Scene(id_, coords_, feats_, std::nullopt);
}

Scene Scene::with_labels(Labels labels) const {
  return Scene(id_, coords_, feats_, std::move(labels));
}

Scene Scene::with_id(SceneId id) const {
  Scene s = *this;
  s.id_ = id;
  return s;
}

bool operator==(const Scene& a, const Scene& b) {
  return a.id_ == b.id_ && a.coords_.rows() == b.coords_.rows() &&
         a.feats_.cols() == b.feats_.cols() && a.coords_ == b.coords_ &&
         a.feats_ == b.feats_ && a.labels_ == b.labels_;
}

void SceneBuilder::reserve(std::size_t points) {
  coords_.reserve(points * 3);
  feats_.reserve(points * static_cast<std::size_t>(feature_dim_));
  if (labeled_) labels_.reserve(points);
}

void SceneBuilder::append(const Scene& src, Eigen::Index row,
                          std::optional<ClassId> label) {
  if (src.feature_dim() != feature_dim_) {
    throw ConsistencyError("scene builder: feature dimension " +
                           std::to_string(src.feature_dim()) + " != " +
                           std::to_string(feature_dim_));
  }
  const float* c = src.coords().row(row).data();
  coords_.insert(coords_.end(), c, c + 3);
  if (feature_dim_ > 0) {
    const float* f = src.feats().row(row).data();
    feats_.insert(feats_.end(), f, f + feature_dim_);
  }
  if (labeled_) {
    if (label) {
      labels_.push_back(*label);
    } else if (src.has_labels()) {
      labels_.push_back(src.labels()[static_cast<std::size_t>(row)]);
    } else {
      throw PreconditionError("scene builder: unlabeled point in labeled scene");
    }
  }
}

void SceneBuilder::append(std::span<const float, 3> xyz,
                          std::span<const float> feats,
                          std::optional<ClassId> label) {
  if (static_cast<Eigen::Index>(feats.size()) != feature_dim_) {
    throw ConsistencyError("scene builder: wrong feature count");
  }
  coords_.insert(coords_.end(), xyz.begin(), xyz.end());
  feats_.insert(feats_.end(), feats.begin(), feats.end());
  if (labeled_) {
    if (!label) throw PreconditionError("scene builder: missing label");
    labels_.push_back(*label);
  }
}

Scene SceneBuilder::build(SceneId id) && {
  const auto m = static_cast<Eigen::Index>(size());
  Scene::Coords coords = Eigen::Map<const Scene::Coords>(coords_.data(), m, 3);
  Scene::Features feats(m, feature_dim_);
  if (feature_dim_ > 0) {
    feats = Eigen::Map<const Scene::Features>(feats_.data(), m, feature_dim_);
  }
  std::optional<Scene::Labels> labels;
  if (labeled_) labels = std::move(labels_);
  return Scene(id, std::move(coords), std::move(feats), std::move(labels));
}

}  // namespace aiscene

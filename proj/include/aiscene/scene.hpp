#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "aiscene/types.hpp"

namespace aiscene {

/// A LiDAR sweep: m points with sensor-relative xyz, r extra features per
/// point (e.g. intensity) and optional per-point class labels.
///
/// Scenes are immutable once built; derived scenes are produced through
/// SceneBuilder or the with_/without_ helpers.
class Scene {
 public:
  using Coords = Eigen::Matrix<float, Eigen::Dynamic, 3, Eigen::RowMajor>;
  using Features =
      Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Labels = std::vector<ClassId>;

  Scene() = default;
  /// Throws ConsistencyError when row counts disagree and ValidationError
  /// on non-finite coordinates.
  Scene(SceneId id, Coords coords, Features feats,
        std::optional<Labels> labels = std::nullopt);

  SceneId id() const { return id_; }
  Eigen::Index size() const { return coords_.rows(); }
  bool empty() const { return size() == 0; }
  Eigen::Index feature_dim() const { return feats_.cols(); }

  const Coords& coords() const { return coords_; }
  const Features& feats() const { return feats_; }

  bool has_labels() const { return labels_.has_value(); }
  /// Throws PreconditionError for an unlabeled scene.
  const Labels& labels() const;

  Scene without_labels() const;
  Scene with_labels(Labels labels) const;
  Scene with_id(SceneId id) const;

  friend bool operator==(const Scene& a, const Scene& b);

 private:
  SceneId id_{};
  Coords coords_{0, 3};
  Features feats_{0, 0};
  std::optional<Labels> labels_;
};

/// Accumulates points row by row and produces a validated Scene.
class SceneBuilder {
 public:
  SceneBuilder(Eigen::Index feature_dim, bool labeled)
      : feature_dim_(feature_dim), labeled_(labeled) {}

  void reserve(std::size_t points);

  /// Appends row `row` of `src`. `label` overrides the source label and is
  /// required when `src` is unlabeled but the builder is labeled.
  void append(const Scene& src, Eigen::Index row,
              std::optional<ClassId> label = std::nullopt);
  void append(std::span<const float, 3> xyz, std::span<const float> feats,
              std::optional<ClassId> label = std::nullopt);

  std::size_t size() const { return coords_.size() / 3; }

  Scene build(SceneId id) &&;

 private:
  Eigen::Index feature_dim_;
  bool labeled_;
  std::vector<float> coords_;
  std::vector<float> feats_;
  std::vector<ClassId> labels_;
};

}  // namespace aiscene

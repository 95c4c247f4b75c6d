#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "aiscene/scene.hpp"
#include "aiscene/schema.hpp"
#include "aiscene/segmentor.hpp"

namespace aiscene {

/// Pooled confusion counts; rows are ground truth, columns predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes);

  /// Ground-truth points of the ignore class are skipped.
  void add(std::span<const ClassId> truth, std::span<const ClassId> predicted,
           std::optional<ClassId> ignore);

  std::int64_t count(ClassId truth, ClassId predicted) const {
    return counts_(truth.value, predicted.value);
  }
  std::int64_t total() const { return counts_.sum(); }

  /// TP / (TP + FP + FN) per class; NaN where the union is empty.
  Eigen::VectorXd iou() const;

 private:
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts_;
};

struct MiouResult {
  Eigen::VectorXd per_class;  ///< NaN for the ignore class and empty unions
  double miou = 0.0;
};

/// mIoU over the classes with a non-empty union, ignore class excluded.
/// Throws PreconditionError when no evaluable point exists.
MiouResult miou_from_confusion(const ConfusionMatrix& cm,
                               const LabelSchema& schema);

/// Predicts every scene with argmax labels and pools the confusion matrix.
MiouResult evaluate_miou(const Segmentor& segmentor, const ParamVector& params,
                         std::span<const Scene* const> scenes,
                         const LabelSchema& schema);

}  // namespace aiscene

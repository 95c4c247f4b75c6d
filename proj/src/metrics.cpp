#include "aiscene/metrics.hpp"

#include <cmath>
#include <limits>

#include "aiscene/erasure.hpp"
#include "aiscene/errors.hpp"

namespace aiscene {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes)
    : counts_(decltype(counts_)::Zero(static_cast<Eigen::Index>(num_classes),
                                      static_cast<Eigen::Index>(num_classes))) {}

void ConfusionMatrix::add(std::span<const ClassId> truth,
                          std::span<const ClassId> predicted,
                          std::optional<ClassId> ignore) {
  if (truth.size() != predicted.size()) {
    throw ConsistencyError("confusion: prediction count mismatch");
  }
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (ignore && truth[i] == *ignore) continue;
    if (truth[i].value >= counts_.rows() || predicted[i].value >= counts_.cols()) {
      throw ValidationError("confusion: class id out of range");
    }
    ++counts_(truth[i].value, predicted[i].value);
  }
}

Eigen::VectorXd ConfusionMatrix::iou() const {
  const Eigen::Index c = counts_.rows();
  Eigen::VectorXd out(c);
  for (Eigen::Index k = 0; k < c; ++k) {
    const auto tp = counts_(k, k);
    const auto fn = counts_.row(k).sum() - tp;
    const auto fp = counts_.col(k).sum() - tp;
    const auto uni = tp + fp + fn;
    out[k] = uni == 0 ? std::numeric_limits<double>::quiet_NaN()
                      : static_cast<double>(tp) / static_cast<double>(uni);
  }
  return out;
}

MiouResult miou_from_confusion(const ConfusionMatrix& cm,
                               const LabelSchema& schema) {
  if (cm.total() == 0) throw PreconditionError("evaluate_miou: no evaluable points");
  MiouResult out;
  out.per_class = cm.iou();
  double sum = 0.0;
  int n = 0;
  for (Eigen::Index k = 0; k < out.per_class.size(); ++k) {
    if (schema.is_ignore(ClassId{static_cast<std::uint16_t>(k)})) {
      out.per_class[k] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    if (std::isnan(out.per_class[k])) continue;
    sum += out.per_class[k];
    ++n;
  }
  out.miou = n == 0 ? 0.0 : sum / n;
  return out;
}

MiouResult evaluate_miou(const Segmentor& segmentor, const ParamVector& params,
                         std::span<const Scene* const> scenes,
                         const LabelSchema& schema) {
  ConfusionMatrix cm(schema.num_classes());
  for (const Scene* scene : scenes) {
    if (!scene->has_labels()) {
      throw PreconditionError("evaluate_miou: evaluation scene is unlabeled");
    }
    const PointProbs probs = segmentor.predict(*scene, params);
    const PseudoLabels argmax = pseudo_label(probs);
    cm.add(scene->labels(), argmax.label, schema.ignore_class());
  }
  return miou_from_confusion(cm, schema);
}

}  // namespace aiscene

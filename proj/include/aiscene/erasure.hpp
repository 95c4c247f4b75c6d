#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aiscene/errors.hpp"
#include "aiscene/scene.hpp"
#include "aiscene/types.hpp"

namespace aiscene {

/// Default confidence threshold for pseudo-labels and point erasure.
inline constexpr double kDefaultTauS = 0.9;

/// Tolerance on row sums of a probability matrix.
inline constexpr double kProbSumTolerance = 1e-5;

struct PseudoLabels {
  std::vector<ClassId> label;
  Eigen::VectorXd confidence;

  std::size_t size() const { return label.size(); }
};

struct ErasureStats {
  std::size_t total_points = 0;
  std::size_t removed_points = 0;
  double removed_fraction = 0.0;  ///< 0 when total_points == 0
};

/// Pseudo-labeled scene restricted to its confident points.
struct ErasedScene {
  Scene scene;
  std::vector<std::uint32_t> kept_index;  ///< survivor -> original row
  ErasureStats stats;
};

/// Throws ValidationError unless every row is a distribution within
/// kProbSumTolerance with entries in [0, 1].
template <typename Derived>
void validate_probs(const Eigen::MatrixBase<Derived>& probs) {
  using Scalar = typename Derived::Scalar;
  for (Eigen::Index p = 0; p < probs.rows(); ++p) {
    const auto row = probs.row(p);
    if (!row.allFinite() || (row.array() < Scalar(0)).any() ||
        (row.array() > Scalar(1)).any()) {
      throw ValidationError("probability row " + std::to_string(p) +
                            " has entries outside [0, 1]");
    }
    if (std::abs(static_cast<double>(row.sum()) - 1.0) > kProbSumTolerance) {
      throw ValidationError("probability row " + std::to_string(p) +
                            " does not sum to 1");
    }
  }
}

/// Per-point argmax label and its probability. Ties resolve to the lowest
/// class id.
template <typename Derived>
PseudoLabels pseudo_label(const Eigen::MatrixBase<Derived>& probs) {
  validate_probs(probs);
  PseudoLabels out;
  out.label.resize(static_cast<std::size_t>(probs.rows()));
  out.confidence.resize(probs.rows());
  for (Eigen::Index p = 0; p < probs.rows(); ++p) {
    Eigen::Index best = 0;
    // maxCoeff keeps the first maximum, which is the lowest class id.
    const auto conf = probs.row(p).maxCoeff(&best);
    out.label[static_cast<std::size_t>(p)] =
        ClassId{static_cast<std::uint16_t>(best)};
    out.confidence[p] = static_cast<double>(conf);
  }
  return out;
}

/// Keeps exactly the points with confidence >= tau_s (inclusive), copying
/// coordinates and features unchanged and labeling survivors with their
/// pseudo-label. Points whose pseudo-label is `ignore` are always removed.
/// Throws ConsistencyError if `pseudo` and `scene` disagree on m.
ErasedScene erase(const Scene& scene, const PseudoLabels& pseudo, double tau_s,
                  std::optional<ClassId> ignore = std::nullopt);

/// Non-erasing counterpart: every point is kept, confident points carry
/// their pseudo-label and the rest carry `ignore`. This is how a
/// pseudo-label pipeline without erasure supervises an unlabeled scene.
Scene pseudo_labeled_scene(const Scene& scene, const PseudoLabels& pseudo,
                           double tau_s, ClassId ignore);

}  // namespace aiscene

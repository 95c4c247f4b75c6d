#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "aiscene/errors.hpp"
#include "aiscene/types.hpp"

namespace aiscene {

/// Loss weights of the combined objective
///   L = L_s + lambda_u * L_u + lambda_l * L_l + consistency_weight * L_c.
struct LossWeights {
  double lambda_u = 1.0;
  double lambda_l = 1.0;
  double consistency_weight = 0.0;

  void validate() const {
    if (!(lambda_u >= 0.0 && lambda_l >= 0.0 && consistency_weight >= 0.0)) {
      throw PreconditionError("loss weights must be non-negative");
    }
  }
};

/// Loss value with its gradient with respect to the softmax logits.
template <typename Scalar>
struct BasicSegLoss {
  Scalar value = Scalar(0);
  BasicPointProbs<Scalar> logit_grad;  ///< m x C; zero rows for unsupervised points
  Scalar supervised_weight = Scalar(0);
};
using SegLoss = BasicSegLoss<double>;

/// Row-wise softmax of a logit block.
template <typename Derived>
BasicPointProbs<typename Derived::Scalar> softmax_rows(
    const Eigen::MatrixBase<Derived>& logits) {
  BasicPointProbs<typename Derived::Scalar> out =
      (logits.colwise() - logits.rowwise().maxCoeff()).array().exp().matrix();
  out.array().colwise() /= out.rowwise().sum().array();
  return out;
}

/// Cross-entropy averaged over supervised points: points labeled `ignore`
/// (and points with zero weight) do not contribute. The returned gradient is
/// with respect to the logits that produced `probs` through a softmax.
/// With no supervised points the loss and the gradient are zero. Throws
/// ValidationError for labels >= C and ConsistencyError on length mismatch.
template <typename Derived>
BasicSegLoss<typename Derived::Scalar> seg_loss(
    const Eigen::MatrixBase<Derived>& probs, std::span<const ClassId> labels,
    std::optional<ClassId> ignore = std::nullopt,
    std::span<const double> weights = {}) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = probs.rows();
  const Eigen::Index c = probs.cols();
  if (static_cast<Eigen::Index>(labels.size()) != m ||
      (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != m)) {
    throw ConsistencyError("seg_loss: label/weight count does not match rows");
  }
  BasicSegLoss<Scalar> out;
  out.logit_grad = BasicPointProbs<Scalar>::Zero(m, c);
  Scalar total_w(0);
  Scalar total(0);
  constexpr Scalar kTiny = std::numeric_limits<Scalar>::min();
  for (Eigen::Index p = 0; p < m; ++p) {
    const ClassId y = labels[static_cast<std::size_t>(p)];
    if (y.value >= c) {
      throw ValidationError("seg_loss: label " + std::to_string(y.value) +
                            " out of range");
    }
    if (ignore && y == *ignore) continue;
    const Scalar w =
        weights.empty() ? Scalar(1) : Scalar(weights[static_cast<std::size_t>(p)]);
    if (w == Scalar(0)) continue;
    total_w += w;
    total -= w * std::log(std::max(probs(p, y.value), kTiny));
    out.logit_grad.row(p) = w * probs.row(p);
    out.logit_grad(p, y.value) -= w;
  }
  if (total_w > Scalar(0)) {
    out.value = total / total_w;
    out.logit_grad /= total_w;
  }
  out.supervised_weight = total_w;
  return out;
}

/// Mean over points and classes of squared probability differences.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar consistency_loss(
    const Eigen::MatrixBase<DerivedA>& teacher,
    const Eigen::MatrixBase<DerivedB>& student) {
  if (teacher.rows() != student.rows() || teacher.cols() != student.cols()) {
    throw ConsistencyError("consistency_loss: shape mismatch");
  }
  if (teacher.size() == 0) return typename DerivedA::Scalar(0);
  return (teacher - student).squaredNorm() /
         static_cast<typename DerivedA::Scalar>(teacher.size());
}

/// Gradient of consistency_loss(teacher, softmax(z)) with respect to the
/// student logits z.
template <typename DerivedA, typename DerivedB>
BasicPointProbs<typename DerivedA::Scalar> consistency_logit_grad(
    const Eigen::MatrixBase<DerivedA>& teacher,
    const Eigen::MatrixBase<DerivedB>& student) {
  using Scalar = typename DerivedA::Scalar;
  if (teacher.rows() != student.rows() || teacher.cols() != student.cols()) {
    throw ConsistencyError("consistency_loss: shape mismatch");
  }
  if (teacher.size() == 0) {
    return BasicPointProbs<Scalar>::Zero(teacher.rows(), teacher.cols());
  }
  const BasicPointProbs<Scalar> g =
      Scalar(2) * (student - teacher) / static_cast<Scalar>(teacher.size());
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inner =
      g.cwiseProduct(student).rowwise().sum();
  BasicPointProbs<Scalar> out =
      student.cwiseProduct((g.colwise() - inner));
  return out;
}

/// L_s + lambda_u * L_u + lambda_l * L_l (+ consistency_weight * L_c).
inline double total_loss(double loss_s, double loss_u, double loss_l,
                         const LossWeights& weights,
                         double loss_consistency = 0.0) {
  return loss_s + weights.lambda_u * loss_u + weights.lambda_l * loss_l +
         weights.consistency_weight * loss_consistency;
}

}  // namespace aiscene

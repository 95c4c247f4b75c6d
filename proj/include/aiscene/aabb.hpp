#pragma once

#include <Eigen/Core>

#include "aiscene/errors.hpp"

namespace aiscene {

/// Axis-aligned box with closed extent [min_corner, max_corner].
template <typename Scalar>
struct BasicAabb {
  using Vector = Eigen::Matrix<Scalar, 3, 1>;

  Vector min_corner = Vector::Zero();
  Vector max_corner = Vector::Zero();

  Vector center() const { return (min_corner + max_corner) / Scalar(2); }

  void expand(const Vector& p) {
    min_corner = min_corner.cwiseMin(p);
    max_corner = max_corner.cwiseMax(p);
  }

  static BasicAabb empty_box() {
    const Scalar big = Eigen::NumTraits<Scalar>::highest();
    return {Vector::Constant(big), Vector::Constant(-big)};
  }

  friend bool operator==(const BasicAabb&, const BasicAabb&) = default;
};

using Aabb = BasicAabb<float>;

/// Componentwise bounds of the rows of an m x 3 point block. Throws
/// PreconditionError for an empty block.
template <typename Derived>
BasicAabb<typename Derived::Scalar> compute_aabb(
    const Eigen::MatrixBase<Derived>& points) {
  static_assert(Derived::ColsAtCompileTime == 3 ||
                Derived::ColsAtCompileTime == Eigen::Dynamic);
  if (points.rows() == 0 || points.cols() != 3) {
    throw PreconditionError("compute_aabb: empty point set");
  }
  return {points.colwise().minCoeff().transpose(),
          points.colwise().maxCoeff().transpose()};
}

/// Closed-interval overlap test: boxes sharing a face intersect.
template <typename Scalar>
bool aabb_intersects(const BasicAabb<Scalar>& a, const BasicAabb<Scalar>& b) {
  return (a.min_corner.array() <= b.max_corner.array()).all() &&
         (b.min_corner.array() <= a.max_corner.array()).all();
}

}  // namespace aiscene

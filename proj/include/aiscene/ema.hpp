#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "aiscene/errors.hpp"

namespace aiscene {

/// Default teacher decay rate.
inline constexpr double kDefaultEmaAlpha = 0.99;

struct EmaConfig {
  double alpha = kDefaultEmaAlpha;
  std::uint64_t step = 0;

  void validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
      throw PreconditionError("ema: alpha must lie in [0, 1)");
    }
  }
};

/// teacher' = alpha * teacher + (1 - alpha) * student, elementwise.
template <typename DerivedT, typename DerivedS>
Eigen::Matrix<typename DerivedT::Scalar, Eigen::Dynamic, 1> ema_update(
    const Eigen::MatrixBase<DerivedT>& teacher,
    const Eigen::MatrixBase<DerivedS>& student,
    typename DerivedT::Scalar alpha) {
  using Scalar = typename DerivedT::Scalar;
  if (teacher.size() != student.size()) {
    throw ConsistencyError("ema_update: parameter vectors differ in length");
  }
  if (!(alpha >= Scalar(0) && alpha < Scalar(1))) {
    throw PreconditionError("ema_update: alpha must lie in [0, 1)");
  }
  return alpha * teacher.reshaped() + (Scalar(1) - alpha) * student.reshaped();
}

}  // namespace aiscene

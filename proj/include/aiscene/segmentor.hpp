#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "aiscene/losses.hpp"
#include "aiscene/scene.hpp"
#include "aiscene/types.hpp"

namespace aiscene {

using ParamVector = Eigen::VectorXd;

struct LossAndGrad {
  double loss = 0.0;
  ParamVector grad;
  double supervised_weight = 0.0;
};

/// A point-wise segmentation model with flat parameters. Parameters live
/// outside the model so teacher and student share one architecture object.
class Segmentor {
 public:
  virtual ~Segmentor() = default;

  virtual std::size_t num_classes() const = 0;
  virtual std::size_t num_params() const = 0;
  virtual ParamVector initial_params() const = 0;

  /// Row p is a distribution over classes for point p.
  virtual PointProbs predict(const Scene& scene,
                             const ParamVector& params) const = 0;

  /// Cross-entropy over supervised points (see seg_loss) and its gradient
  /// with respect to the parameters.
  virtual LossAndGrad loss_and_grad(const Scene& scene,
                                    std::span<const ClassId> labels,
                                    std::optional<ClassId> ignore,
                                    const ParamVector& params,
                                    std::span<const double> weights = {}) const = 0;

  /// Consistency loss against fixed target probabilities and its gradient.
  virtual LossAndGrad consistency_and_grad(const Scene& scene,
                                           const PointProbs& target,
                                           const ParamVector& params) const = 0;
};

/// Hand-crafted per-point features for ToySegmentor.
struct ToyFeatureConfig {
  double z_min = -2.5;   ///< first height basis center (meters)
  double z_max = 4.5;    ///< last height basis center
  int z_basis = 15;
  int intensity_basis = 6;
  double density_voxel = 1.0;  ///< voxel edge for the density count (meters)
  double density_log_max = 5.0;  ///< log(1 + count) of the last density center
  int density_basis = 6;
  double range_scale = 50.0;

  std::size_t dimension() const {
    return 2 + static_cast<std::size_t>(z_basis + intensity_basis + density_basis);
  }
};

/// Multinomial logistic regression over Gaussian-basis expansions of
/// height, intensity, and local point density (the number of points
/// sharing the point's voxel, found through a voxel hash), plus BEV range
/// and a bias. Parameters are the feature-by-class weight matrix, column
/// major.
class ToySegmentor final : public Segmentor {
 public:
  using FeatureMatrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit ToySegmentor(std::size_t num_classes, ToyFeatureConfig config = {});

  std::size_t num_classes() const override { return num_classes_; }
  std::size_t num_params() const override {
    return num_classes_ * config_.dimension();
  }
  ParamVector initial_params() const override;

  FeatureMatrix features(const Scene& scene) const;
  PointProbs predict(const Scene& scene, const ParamVector& params) const override;
  PointProbs predict_from_features(const FeatureMatrix& feats,
                                   const ParamVector& params) const;
  LossAndGrad loss_and_grad(const Scene& scene, std::span<const ClassId> labels,
                            std::optional<ClassId> ignore,
                            const ParamVector& params,
                            std::span<const double> weights = {}) const override;
  LossAndGrad consistency_and_grad(const Scene& scene, const PointProbs& target,
                                   const ParamVector& params) const override;

  const ToyFeatureConfig& config() const { return config_; }

 private:
  void check_params(const ParamVector& params) const;

  std::size_t num_classes_;
  ToyFeatureConfig config_;
};

/// Returns the scene's own labels as one-hot predictions. Useful as an
/// upper bound when checking evaluation plumbing; has no parameters.
class OracleSegmentor final : public Segmentor {
 public:
  explicit OracleSegmentor(std::size_t num_classes) : num_classes_(num_classes) {}

  std::size_t num_classes() const override { return num_classes_; }
  std::size_t num_params() const override { return 0; }
  ParamVector initial_params() const override { return ParamVector(); }
  PointProbs predict(const Scene& scene, const ParamVector& params) const override;
  LossAndGrad loss_and_grad(const Scene& scene, std::span<const ClassId> labels,
                            std::optional<ClassId> ignore,
                            const ParamVector& params,
                            std::span<const double> weights = {}) const override;
  LossAndGrad consistency_and_grad(const Scene& scene, const PointProbs& target,
                                   const ParamVector& params) const override;

 private:
  std::size_t num_classes_;
};

}  // namespace aiscene

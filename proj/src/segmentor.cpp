#include "aiscene/segmentor.hpp"

#include <cmath>
#include <unordered_map>

#include "aiscene/errors.hpp"

namespace aiscene {
namespace {

// Gaussian bumps at `count` evenly spaced centers on [lo, hi], with the
// center spacing as width.
void expand_basis(double v, double lo, double hi, int count, double* out) {
  if (count == 1) {
    out[0] = std::exp(-0.5 * (v - lo) * (v - lo));
    return;
  }
  const double step = (hi - lo) / (count - 1);
  for (int k = 0; k < count; ++k) {
    const double d = (v - (lo + k * step)) / step;
    out[k] = std::exp(-0.5 * d * d);
  }
}

std::uint64_t voxel_key(float x, float y, float z, double edge) {
  constexpr std::int64_t kOffset = 1 << 20;
  constexpr std::uint64_t kMask = (1u << 21) - 1;
  auto q = [&](float v) {
    return static_cast<std::uint64_t>(
               static_cast<std::int64_t>(std::floor(v / edge)) + kOffset) &
           kMask;
  };
  return q(x) | (q(y) << 21) | (q(z) << 42);
}

}  // namespace

ToySegmentor::ToySegmentor(std::size_t num_classes, ToyFeatureConfig config)
    : num_classes_(num_classes), config_(config) {
  if (num_classes_ < 1) throw PreconditionError("segmentor: no classes");
  if (config_.z_basis < 1 || config_.intensity_basis < 1 ||
      config_.density_basis < 1 || !(config_.density_voxel > 0.0) ||
      !(config_.range_scale > 0.0)) {
    throw PreconditionError("segmentor: invalid feature config");
  }
}

ParamVector ToySegmentor::initial_params() const {
  return ParamVector::Zero(static_cast<Eigen::Index>(num_params()));
}

void ToySegmentor::check_params(const ParamVector& params) const {
  if (static_cast<std::size_t>(params.size()) != num_params()) {
    throw ConsistencyError("segmentor: expected " + std::to_string(num_params()) +
                           " parameters, got " + std::to_string(params.size()));
  }
}

ToySegmentor::FeatureMatrix ToySegmentor::features(const Scene& scene) const {
  const Eigen::Index m = scene.size();
  const auto d = static_cast<Eigen::Index>(config_.dimension());
  FeatureMatrix f(m, d);
  const auto& xyz = scene.coords();

  std::unordered_map<std::uint64_t, std::uint32_t> voxels;
  voxels.reserve(static_cast<std::size_t>(m));
  std::vector<std::uint64_t> keys(static_cast<std::size_t>(m));
  for (Eigen::Index p = 0; p < m; ++p) {
    keys[static_cast<std::size_t>(p)] =
        voxel_key(xyz(p, 0), xyz(p, 1), xyz(p, 2), config_.density_voxel);
    ++voxels[keys[static_cast<std::size_t>(p)]];
  }

  for (Eigen::Index p = 0; p < m; ++p) {
    double* row = f.row(p).data();
    row[0] = 1.0;
    row[1] = std::hypot(static_cast<double>(xyz(p, 0)),
                        static_cast<double>(xyz(p, 1))) /
             config_.range_scale;
    double* cursor = row + 2;
    expand_basis(xyz(p, 2), config_.z_min, config_.z_max, config_.z_basis,
                 cursor);
    cursor += config_.z_basis;
    const double intensity =
        scene.feature_dim() > 0 ? static_cast<double>(scene.feats()(p, 0)) : 0.0;
    expand_basis(intensity, 0.0, 1.0, config_.intensity_basis, cursor);
    cursor += config_.intensity_basis;
    const double density =
        std::log1p(static_cast<double>(voxels[keys[static_cast<std::size_t>(p)]]));
    expand_basis(density, 0.0, config_.density_log_max, config_.density_basis,
                 cursor);
  }
  return f;
}

PointProbs ToySegmentor::predict_from_features(const FeatureMatrix& feats,
                                               const ParamVector& params) const {
  check_params(params);
  const auto d = static_cast<Eigen::Index>(config_.dimension());
  const Eigen::Map<const Eigen::MatrixXd> w(params.data(), d,
                                            static_cast<Eigen::Index>(num_classes_));
  const PointProbs logits = feats * w;
  return softmax_rows(logits);
}

PointProbs ToySegmentor::predict(const Scene& scene,
                                 const ParamVector& params) const {
  return predict_from_features(features(scene), params);
}

LossAndGrad ToySegmentor::loss_and_grad(const Scene& scene,
                                        std::span<const ClassId> labels,
                                        std::optional<ClassId> ignore,
                                        const ParamVector& params,
                                        std::span<const double> weights) const {
  const FeatureMatrix f = features(scene);
  const PointProbs probs = predict_from_features(f, params);
  const SegLoss sl = seg_loss(probs, labels, ignore, weights);
  LossAndGrad out;
  out.loss = sl.value;
  out.supervised_weight = sl.supervised_weight;
  const Eigen::MatrixXd gw = f.transpose() * sl.logit_grad;
  out.grad = gw.reshaped();
  return out;
}

LossAndGrad ToySegmentor::consistency_and_grad(const Scene& scene,
                                               const PointProbs& target,
                                               const ParamVector& params) const {
  const FeatureMatrix f = features(scene);
  const PointProbs probs = predict_from_features(f, params);
  LossAndGrad out;
  out.loss = consistency_loss(target, probs);
  out.supervised_weight = static_cast<double>(scene.size());
  const Eigen::MatrixXd gw = f.transpose() * consistency_logit_grad(target, probs);
  out.grad = gw.reshaped();
  return out;
}

PointProbs OracleSegmentor::predict(const Scene& scene,
                                    const ParamVector& /*params*/) const {
  const auto& labels = scene.labels();
  PointProbs out = PointProbs::Zero(scene.size(),
                                    static_cast<Eigen::Index>(num_classes_));
  for (Eigen::Index p = 0; p < scene.size(); ++p) {
    const auto c = labels[static_cast<std::size_t>(p)].value;
    if (c >= num_classes_) throw ValidationError("oracle: label out of range");
    out(p, c) = 1.0;
  }
  return out;
}

LossAndGrad OracleSegmentor::loss_and_grad(const Scene& scene,
                                           std::span<const ClassId> labels,
                                           std::optional<ClassId> ignore,
                                           const ParamVector& params,
                                           std::span<const double> weights) const {
  const SegLoss sl = seg_loss(predict(scene, params), labels, ignore, weights);
  return {sl.value, ParamVector(), sl.supervised_weight};
}

LossAndGrad OracleSegmentor::consistency_and_grad(const Scene& scene,
                                                  const PointProbs& target,
                                                  const ParamVector& params) const {
  return {consistency_loss(target, predict(scene, params)), ParamVector(),
          static_cast<double>(scene.size())};
}

}  // namespace aiscene

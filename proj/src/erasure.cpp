#include "aiscene/erasure.hpp"

namespace aiscene {
namespace {

void check_aligned(const Scene& scene, const PseudoLabels& pseudo) {
  if (static_cast<Eigen::Index>(pseudo.size()) != scene.size() ||
      pseudo.confidence.size() != scene.size()) {
    throw ConsistencyError("erase: " + std::to_string(pseudo.size()) +
                           " pseudo-labels for " +
                           std::to_string(scene.size()) + " points");
  }
}

}  // namespace

ErasedScene erase(const Scene& scene, const PseudoLabels& pseudo, double tau_s,
                  std::optional<ClassId> ignore) {
  check_aligned(scene, pseudo);
  ErasedScene out;
  SceneBuilder builder(scene.feature_dim(), true);
  builder.reserve(static_cast<std::size_t>(scene.size()));
  for (Eigen::Index p = 0; p < scene.size(); ++p) {
    const ClassId label = pseudo.label[static_cast<std::size_t>(p)];
    if (pseudo.confidence[p] >= tau_s && !(ignore && label == *ignore)) {
      builder.append(scene, p, label);
      out.kept_index.push_back(static_cast<std::uint32_t>(p));
    }
  }
  out.scene = std::move(builder).build(scene.id());
  out.stats.total_points = static_cast<std::size_t>(scene.size());
  out.stats.removed_points = out.stats.total_points - out.kept_index.size();
  out.stats.removed_fraction =
      out.stats.total_points == 0
          ? 0.0
          : static_cast<double>(out.stats.removed_points) /
                static_cast<double>(out.stats.total_points);
  return out;
}

Scene pseudo_labeled_scene(const Scene& scene, const PseudoLabels& pseudo,
                           double tau_s, ClassId ignore) {
  check_aligned(scene, pseudo);
  Scene::Labels labels(static_cast<std::size_t>(scene.size()));
  for (Eigen::Index p = 0; p < scene.size(); ++p) {
    const auto i = static_cast<std::size_t>(p);
    labels[i] = pseudo.confidence[p] >= tau_s ? pseudo.label[i] : ignore;
  }
  return scene.with_labels(std::move(labels));
}

}  // namespace aiscene

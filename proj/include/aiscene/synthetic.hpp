#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "aiscene/scene.hpp"
#include "aiscene/schema.hpp"

namespace aiscene {

enum class ObjectShape { box, cylinder, blob };

/// One class of objects scattered over the ground plane.
struct SyntheticObjectClass {
  ClassId id;
  ObjectShape shape = ObjectShape::box;
  double expected_count = 0.0;  ///< Poisson mean of instances per scene
  Eigen::Vector3d size{1.0, 1.0, 1.0};  ///< extent along x, y, z (meters)
  double base_height = 0.0;  ///< bottom of the object above the ground
  double intensity_mean = 0.5;
  double intensity_sigma = 0.1;
  double points_scale = 1.0;  ///< multiplier on points_per_instance
  bool random_yaw = false;
};

/// Desk-scale stand-in for a driving dataset: a noisy ground plane plus
/// clusters of points for each object class and some unlabeled clutter.
struct SyntheticSpec {
  double extent = 50.0;  ///< BEV half width; points lie in [-extent, extent]^2
  double ground_z = -1.7;
  ClassId ground_class{1};
  std::size_t ground_points = 4000;
  double ground_intensity_mean = 0.2;
  double ground_intensity_sigma = 0.05;
  std::vector<SyntheticObjectClass> objects;
  int min_points_per_instance = 20;
  int max_points_per_instance = 60;
  std::size_t clutter_points = 0;  ///< uniform outliers labeled `clutter_class`
  ClassId clutter_class{0};
  double noise_sigma = 0.02;
  std::uint64_t seed = 0;

  /// Throws PreconditionError on negative extents, counts or noise.
  void validate() const;
};

/// Draws a fully labeled synthetic scene. The result depends only on
/// (spec, seed) and carries scene id `seed` truncated to 32 bits.
///
/// Sampling procedure, in draw order from the engine
/// `derive_rng(spec.seed, seed)`:
///   1. one std::poisson_distribution<int> draw per object class, in the
///      order of `spec.objects`, giving that class's instance count (classes
///      with expected_count <= 0 get 0 and consume no draw);
///   2. the ground points: x, y uniform in [-extent, extent], z normal around
///      ground_z with sigma noise_sigma, intensity normal and clamped to [0, 1];
///   3. each instance of each class in order: a BEV center uniform in the
///      extent, an optional yaw, a point count uniform in
///      [min, max] * points_scale, then per point a shape-local sample plus
///      isotropic noise and an intensity;
///   4. the clutter points, uniform in the extent and 6 m above ground.
///
/// When `instance_ids` is non-null it receives one id per point: 0 for
/// ground and clutter, 1.. for object instances in creation order.
Scene generate_synthetic_scene(const SyntheticSpec& spec, std::uint64_t seed,
                               std::vector<std::uint32_t>* instance_ids = nullptr);

/// Default six-class vocabulary used by the synthetic benchmark:
/// unlabeled (ignore), road, vegetation, car (thing), person (thing),
/// pole (thing).
LabelSchema synthetic_schema();

/// The synthetic benchmark scene recipe matching synthetic_schema().
SyntheticSpec synthetic_benchmark_spec();

}  // namespace aiscene

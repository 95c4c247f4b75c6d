#include "aiscene/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "aiscene/errors.hpp"

namespace aiscene {

void SyntheticSpec::validate() const {
  if (!(extent > 0.0)) throw PreconditionError("synthetic: extent must be > 0");
  if (!(noise_sigma >= 0.0)) {
    throw PreconditionError("synthetic: noise_sigma must be >= 0");
  }
  if (min_points_per_instance < 1 ||
      max_points_per_instance < min_points_per_instance) {
    throw PreconditionError("synthetic: bad points_per_instance range");
  }
  for (const auto& obj : objects) {
    if (!(obj.expected_count >= 0.0) || !(obj.points_scale > 0.0) ||
        (obj.size.array() < 0.0).any()) {
      throw PreconditionError("synthetic: negative object parameter");
    }
  }
}

namespace {

float clamp01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

Eigen::Vector3d sample_local(ObjectShape shape, const Eigen::Vector3d& size,
                             Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (shape) {
    case ObjectShape::box:
      return {(u(rng) - 0.5) * size.x(), (u(rng) - 0.5) * size.y(),
              u(rng) * size.z()};
    case ObjectShape::cylinder: {
      const double r = 0.5 * size.x() * std::sqrt(u(rng));
      const double a = 2.0 * std::numbers::pi * u(rng);
      return {r * std::cos(a), r * std::sin(a), u(rng) * size.z()};
    }
    case ObjectShape::blob: {
      std::normal_distribution<double> n(0.0, 1.0);
      Eigen::Vector3d p(n(rng) * size.x() / 4.0, n(rng) * size.y() / 4.0,
                        std::clamp(0.5 + n(rng) / 4.0, 0.0, 1.0) * size.z());
      return p;
    }
  }
  return Eigen::Vector3d::Zero();
}

}  // namespace

Scene generate_synthetic_scene(const SyntheticSpec& spec, std::uint64_t seed,
                               std::vector<std::uint32_t>* instance_ids) {
  spec.validate();
  Rng rng = derive_rng(spec.seed, seed);

  std::vector<int> counts;
  counts.reserve(spec.objects.size());
  for (const auto& obj : spec.objects) {
    if (obj.expected_count <= 0.0) {
      counts.push_back(0);
    } else {
      counts.push_back(std::poisson_distribution<int>(obj.expected_count)(rng));
    }
  }

  SceneBuilder builder(1, true);
  std::vector<std::uint32_t> ids;
  builder.reserve(spec.ground_points + spec.clutter_points + 1024);

  const double e = spec.extent;
  std::uniform_real_distribution<double> bev(-e, e);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  auto push = [&](double x, double y, double z, double intensity, ClassId c,
                  std::uint32_t inst) {
    const std::array<float, 3> xyz{static_cast<float>(x),
                                   static_cast<float>(y),
                                   static_cast<float>(z)};
    const float f = clamp01(intensity);
    builder.append(xyz, std::span<const float>(&f, 1), c);
    ids.push_back(inst);
  };

  for (std::size_t i = 0; i < spec.ground_points; ++i) {
    const double x = bev(rng);
    const double y = bev(rng);
    const double z = spec.ground_z + spec.noise_sigma * noise(rng);
    const double in = spec.ground_intensity_mean +
                      spec.ground_intensity_sigma * noise(rng);
    push(x, y, z, in, spec.ground_class, 0);
  }

  std::uint32_t next_instance = 1;
  for (std::size_t k = 0; k < spec.objects.size(); ++k) {
    const auto& obj = spec.objects[k];
    std::uniform_int_distribution<int> npts(
        static_cast<int>(std::lround(spec.min_points_per_instance * obj.points_scale)),
        std::max(1, static_cast<int>(std::lround(spec.max_points_per_instance *
                                                 obj.points_scale))));
    for (int inst = 0; inst < counts[k]; ++inst) {
      const double cx = bev(rng);
      const double cy = bev(rng);
      const double yaw =
          obj.random_yaw ? unit(rng) * std::numbers::pi : 0.0;
      const double cs = std::cos(yaw);
      const double sn = std::sin(yaw);
      const int n = std::max(1, npts(rng));
      for (int p = 0; p < n; ++p) {
        const Eigen::Vector3d l = sample_local(obj.shape, obj.size, rng);
        const double x = cx + cs * l.x() - sn * l.y() + spec.noise_sigma * noise(rng);
        const double y = cy + sn * l.x() + cs * l.y() + spec.noise_sigma * noise(rng);
        const double z = spec.ground_z + obj.base_height + l.z() +
                         spec.noise_sigma * noise(rng);
        const double in = obj.intensity_mean + obj.intensity_sigma * noise(rng);
        push(std::clamp(x, -e, e), std::clamp(y, -e, e), z, in, obj.id,
             next_instance);
      }
      ++next_instance;
    }
  }

  for (std::size_t i = 0; i < spec.clutter_points; ++i) {
    const double x = bev(rng);
    const double y = bev(rng);
    const double z = spec.ground_z + 6.0 * unit(rng);
    push(x, y, z, unit(rng), spec.clutter_class, 0);
  }

  if (instance_ids) *instance_ids = std::move(ids);
  return std::move(builder).build(SceneId{static_cast<std::uint32_t>(seed)});
}

LabelSchema synthetic_schema() {
  return LabelSchema({"unlabeled", "road", "vegetation", "car", "person", "pole"},
                     {ClassId{3}, ClassId{4}, ClassId{5}}, ClassId{0});
}

SyntheticSpec synthetic_benchmark_spec() {
  SyntheticSpec spec;
  spec.extent = 30.0;
  spec.ground_class = ClassId{1};
  spec.ground_points = 2500;
  spec.ground_intensity_mean = 0.25;
  spec.ground_intensity_sigma = 0.1;
  spec.min_points_per_instance = 20;
  spec.max_points_per_instance = 60;
  spec.clutter_points = 40;
  spec.clutter_class = ClassId{0};
  spec.noise_sigma = 0.05;
  spec.seed = 2024;

  SyntheticObjectClass vegetation;
  vegetation.id = ClassId{2};
  vegetation.shape = ObjectShape::blob;
  vegetation.expected_count = 8.0;
  vegetation.size = {3.0, 3.0, 3.5};
  vegetation.base_height = 0.3;
  vegetation.intensity_mean = 0.35;
  vegetation.intensity_sigma = 0.12;
  vegetation.points_scale = 1.5;

  SyntheticObjectClass car;
  car.id = ClassId{3};
  car.shape = ObjectShape::box;
  car.expected_count = 4.0;
  car.size = {4.2, 1.8, 1.5};
  car.intensity_mean = 0.55;
  car.intensity_sigma = 0.15;
  car.points_scale = 1.5;
  car.random_yaw = true;

  SyntheticObjectClass person;
  person.id = ClassId{4};
  person.shape = ObjectShape::cylinder;
  person.expected_count = 3.0;
  person.size = {0.6, 0.6, 1.75};
  person.intensity_mean = 0.45;
  person.intensity_sigma = 0.15;
  person.points_scale = 0.5;

  SyntheticObjectClass pole;
  pole.id = ClassId{5};
  pole.shape = ObjectShape::cylinder;
  pole.expected_count = 2.0;
  pole.size = {0.3, 0.3, 4.0};
  pole.intensity_mean = 0.4;
  pole.intensity_sigma = 0.15;
  pole.points_scale = 0.5;

  spec.objects = {vegetation, car, person, pole};
  return spec;
}

}  // namespace aiscene

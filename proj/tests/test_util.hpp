#pragma once

#include <array>
#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "aiscene/scene.hpp"
#include "aiscene/types.hpp"

namespace aiscene::testing {

/// Removes itself on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("aiscene_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

/// (x, y, z, intensity) rows; labels optional.
inline Scene make_scene(const std::vector<std::array<float, 4>>& rows,
                        std::optional<std::vector<std::uint16_t>> labels = {},
                        SceneId id = {}) {
  Scene::Coords coords(static_cast<Eigen::Index>(rows.size()), 3);
  Scene::Features feats(static_cast<Eigen::Index>(rows.size()), 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    coords.row(r) << rows[i][0], rows[i][1], rows[i][2];
    feats(r, 0) = rows[i][3];
  }
  std::optional<Scene::Labels> l;
  if (labels) {
    l.emplace();
    for (auto v : *labels) l->push_back(ClassId{v});
  }
  return Scene(id, std::move(coords), std::move(feats), std::move(l));
}

/// Uniform points in [-extent, extent]^2 x [-2, 3] with labels in
/// [0, num_classes).
inline Scene random_scene(Rng& rng, Eigen::Index m, std::uint16_t num_classes,
                          float extent = 50.0f, bool labeled = true,
                          SceneId id = {}) {
  std::uniform_real_distribution<float> xy(-extent, extent);
  std::uniform_real_distribution<float> z(-2.0f, 3.0f);
  std::uniform_real_distribution<float> inten(0.0f, 1.0f);
  std::uniform_int_distribution<int> cls(0, num_classes - 1);
  Scene::Coords coords(m, 3);
  Scene::Features feats(m, 1);
  Scene::Labels labels;
  for (Eigen::Index p = 0; p < m; ++p) {
    coords(p, 0) = xy(rng);
    coords(p, 1) = xy(rng);
    coords(p, 2) = z(rng);
    feats(p, 0) = inten(rng);
    labels.push_back(ClassId{static_cast<std::uint16_t>(cls(rng))});
  }
  std::optional<Scene::Labels> l;
  if (labeled) l = std::move(labels);
  return Scene(id, std::move(coords), std::move(feats), std::move(l));
}

/// Random probability rows; about half are sharply peaked so that a 0.9
/// threshold splits them in a non-trivial way.
inline PointProbs random_probs(Rng& rng, Eigen::Index m, Eigen::Index c) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> pick(0, c - 1);
  PointProbs probs(m, c);
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index k = 0; k < c; ++k) probs(p, k) = u(rng);
    if (u(rng) < 0.5) probs(p, pick(rng)) += 20.0 * u(rng) * c;
    probs.row(p) /= probs.row(p).sum();
  }
  return probs;
}

}  // namespace aiscene::testing

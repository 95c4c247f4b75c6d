#include <gtest/gtest.h>

#include "aiscene/erasure.hpp"
#include "aiscene/errors.hpp"
#include "test_util.hpp"

namespace aiscene {
namespace {

using testing::make_scene;
using testing::random_probs;
using testing::random_scene;

PointProbs rows(std::initializer_list<std::initializer_list<double>> r) {
  PointProbs p(static_cast<Eigen::Index>(r.size()),
               static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index k = 0;
    for (double v : row) p(i, k++) = v;
    ++i;
  }
  return p;
}

TEST(PseudoLabel, ArgmaxAndConfidence) {
  const PseudoLabels pl = pseudo_label(rows({{0.1, 0.7, 0.2}, {0.5, 0.5, 0.0}}));
  EXPECT_EQ(pl.label[0], ClassId{1});
  EXPECT_DOUBLE_EQ(pl.confidence[0], 0.7);
  EXPECT_EQ(pl.label[1], ClassId{0});  // tie goes to the lower id
}

TEST(PseudoLabel, RejectsNonDistributions) {
  EXPECT_THROW(pseudo_label(rows({{0.5, 0.6}})), ValidationError);
  EXPECT_THROW(pseudo_label(rows({{1.5, -0.5}})), ValidationError);
  EXPECT_THROW(pseudo_label(rows({{std::nan(""), 1.0}})), ValidationError);
}

TEST(Erase, KeepsOnlyConfidentPoints) {
  const Scene s = make_scene({{1, 1, 0, 0.1f}, {2, 2, 0, 0.2f}});
  const ErasedScene e = erase(s, pseudo_label(rows({{0.95, 0.05}, {0.6, 0.4}})), 0.9);
  ASSERT_EQ(e.scene.size(), 1);
  EXPECT_EQ(e.kept_index, std::vector<std::uint32_t>{0});
  EXPECT_EQ(e.scene.coords().row(0), s.coords().row(0));
  EXPECT_EQ(e.scene.labels()[0], ClassId{0});
  EXPECT_DOUBLE_EQ(e.stats.removed_fraction, 0.5);
  EXPECT_EQ(e.stats.removed_points, 1u);
}

TEST(Erase, ThresholdIsInclusive) {
  const Scene s = make_scene({{0, 0, 0, 0}});
  PointProbs p(1, 2);
  p << 0.9, 1.0 - 0.9;
  EXPECT_EQ(erase(s, pseudo_label(p), 0.9).scene.size(), 1);
}

TEST(Erase, EverythingBelowThresholdGivesEmptyScene) {
  const Scene s = make_scene({{0, 0, 0, 0}, {1, 0, 0, 0}});
  const ErasedScene e = erase(s, pseudo_label(rows({{0.5, 0.5}, {0.4, 0.6}})), 0.9);
  EXPECT_TRUE(e.scene.empty());
  EXPECT_TRUE(e.scene.has_labels());
  EXPECT_DOUBLE_EQ(e.stats.removed_fraction, 1.0);
}

TEST(Erase, EmptySceneRemovesNothing) {
  const Scene s = make_scene({});
  const ErasedScene e = erase(s, pseudo_label(PointProbs(0, 3)), 0.9);
  EXPECT_TRUE(e.scene.empty());
  EXPECT_EQ(e.stats.removed_fraction, 0.0);
}

TEST(Erase, IgnoreArgmaxIsAlwaysRemoved) {
  const Scene s = make_scene({{0, 0, 0, 0}, {1, 0, 0, 0}});
  const ErasedScene e =
      erase(s, pseudo_label(rows({{0.99, 0.01}, {0.01, 0.99}})), 0.9, ClassId{0});
  EXPECT_EQ(e.kept_index, std::vector<std::uint32_t>{1});
}

TEST(Erase, SizeMismatchIsAConsistencyError) {
  const Scene s = make_scene({{0, 0, 0, 0}});
  EXPECT_THROW(erase(s, pseudo_label(rows({{1.0, 0.0}, {0.0, 1.0}})), 0.9), ConsistencyError);
}

TEST(Erase, MatchesBruteForceFilter) {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const Scene s = random_scene(rng, 1 + trial * 13, 4, 50.0f, false);
    const PointProbs probs = random_probs(rng, s.size(), 4);
    const double tau = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
    const ErasedScene e = erase(s, pseudo_label(probs), tau);
    std::vector<std::uint32_t> expect;
    for (Eigen::Index p = 0; p < s.size(); ++p) {
      double best = -1.0;
      for (Eigen::Index k = 0; k < 4; ++k) best = std::max(best, probs(p, k));
      if (best >= tau) expect.push_back(static_cast<std::uint32_t>(p));
    }
    ASSERT_EQ(e.kept_index, expect);
    for (std::size_t i = 0; i < expect.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      EXPECT_EQ(e.scene.coords().row(r), s.coords().row(expect[i]));
      EXPECT_EQ(e.scene.feats().row(r), s.feats().row(expect[i]));
    }
  }
}

TEST(Erase, IsIdempotent) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Scene s = random_scene(rng, 200, 3, 50.0f, false);
    const PointProbs probs = random_probs(rng, s.size(), 3);
    const ErasedScene once = erase(s, pseudo_label(probs), 0.9);
    PointProbs kept(static_cast<Eigen::Index>(once.kept_index.size()), 3);
    for (std::size_t i = 0; i < once.kept_index.size(); ++i) {
      kept.row(static_cast<Eigen::Index>(i)) = probs.row(once.kept_index[i]);
    }
    const ErasedScene twice = erase(once.scene.without_labels(), pseudo_label(kept), 0.9);
    EXPECT_EQ(twice.scene, once.scene);
    EXPECT_EQ(twice.stats.removed_points, 0u);
  }
}

TEST(Erase, HigherThresholdKeepsASubset) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Scene s = random_scene(rng, 300, 5, 50.0f, false);
    const PseudoLabels pl = pseudo_label(random_probs(rng, s.size(), 5));
    const auto lo = erase(s, pl, 0.5).kept_index;
    const auto hi = erase(s, pl, 0.8).kept_index;
    EXPECT_TRUE(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
  }
}

TEST(PseudoLabeledScene, LowConfidencePointsGetIgnore) {
  const Scene s = make_scene({{0, 0, 0, 0}, {1, 0, 0, 0}});
  const Scene out =
      pseudo_labeled_scene(s, pseudo_label(rows({{0.05, 0.95}, {0.4, 0.6}})), 0.9, ClassId{0});
  EXPECT_EQ(out.size(), 2);
  EXPECT_EQ(out.labels(), (Scene::Labels{ClassId{1}, ClassId{0}}));
  EXPECT_EQ(out.coords(), s.coords());
}

}  // namespace
}  // namespace aiscene

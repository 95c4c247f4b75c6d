#include <gtest/gtest.h>

#include <map>
#include <set>

#include "aiscene/errors.hpp"
#include "aiscene/mixing.hpp"
#include "aiscene/pools.hpp"
#include "test_util.hpp"

namespace aiscene {
namespace {

using testing::make_scene;
using testing::random_scene;

LabelSchema schema() {
  return LabelSchema({"unlabeled", "road", "car", "person"}, {ClassId{2}, ClassId{3}}, ClassId{0});
}

// 2 x 2 grid over [0, 2]^2: cell j covers column j % 2, row j / 2.
GridSpec grid2() { return GridSpec{2, {0.0, 2.0}, {0.0, 2.0}}; }

// `per_cell` points in every cell of grid2, labeled `label`, id `id`.
Scene micro_scene(Rng& rng, int per_cell, std::uint16_t label, std::uint32_t id) {
  std::uniform_real_distribution<float> u(0.05f, 0.95f);
  std::vector<std::array<float, 4>> rows;
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < per_cell; ++k) {
      rows.push_back({static_cast<float>(j % 2) + u(rng), static_cast<float>(j / 2) + u(rng), 0.0f, 0.5f});
    }
  }
  return make_scene(rows, std::vector<std::uint16_t>(rows.size(), label), SceneId{id});
}

std::set<std::uint32_t> pool_cells(const AugmentedScene& s, const GridSpec& g) {
  std::set<std::uint32_t> out;
  const auto cells = assign_cells(s.scene, g);
  for (std::size_t p = 0; p < s.origin.size(); ++p) {
    if (s.origin[p].branch == Branch::pool_patch) out.insert(static_cast<std::uint32_t>(cells[p]));
  }
  return out;
}

std::set<std::uint32_t> base_cells(const AugmentedScene& s, const GridSpec& g) {
  std::set<std::uint32_t> out;
  const auto cells = assign_cells(s.scene, g);
  for (std::size_t p = 0; p < s.origin.size(); ++p) {
    if (s.origin[p].branch == Branch::base) out.insert(static_cast<std::uint32_t>(cells[p]));
  }
  return out;
}

TEST(SampleMask, ExtremesAndHalf) {
  Rng rng(1);
  EXPECT_EQ(sample_mask(324, 0.0, rng).replaced_count(), 0u);
  EXPECT_EQ(sample_mask(324, 1.0, rng).replaced_count(), 324u);
  EXPECT_EQ(sample_mask(324, 0.5, rng).replaced_count(), 162u);
  EXPECT_EQ(sample_mask(4, 0.5, rng).size(), 4u);
  EXPECT_THROW(sample_mask(0, 0.5, rng), PreconditionError);
  EXPECT_THROW(sample_mask(4, 1.5, rng), PreconditionError);
}

TEST(SampleMask, SameSeedSameMask) {
  Rng a(77), b(77);
  EXPECT_EQ(sample_mask(324, 0.3, a).keep, sample_mask(324, 0.3, b).keep);
}

TEST(SampleMask, IndicesAreReplacedUniformly) {
  Rng rng(2024);
  constexpr int kDraws = 10000;
  std::vector<int> hits(324, 0);
  for (int d = 0; d < kDraws; ++d) {
    const MixMask m = sample_mask(324, 0.5, rng);
    for (std::size_t j = 0; j < 324; ++j) hits[j] += !m.keep[j];
  }
  // Per-index 3-sigma bands are exceeded by ~0.9 of 324 indices even for a
  // perfect sampler, so the check is family-wise: every index within the
  // Bonferroni bound for alpha = 1e-3 (4.67 sigma), and no more than 5
  // indices beyond 3 sigma (binomial tail below 1e-3).
  const double sigma = std::sqrt(kDraws * 0.25);
  int beyond_3 = 0;
  for (std::size_t j = 0; j < 324; ++j) {
    const double dev = std::abs(hits[j] - kDraws * 0.5);
    EXPECT_LE(dev, 4.67 * sigma) << "index " << j;
    beyond_3 += dev > 3.0 * sigma;
  }
  EXPECT_LE(beyond_3, 5);
}

TEST(MixPatch, AllKeepMaskIsIdentityForUnlabeledBranch) {
  Rng rng(3);
  const Scene base = micro_scene(rng, 6, 1, 100);
  const Scene donor = micro_scene(rng, 6, 2, 1);
  const Scene* d = &donor;
  const Pools pools = build_labeled_pools({&d, 1}, grid2(), PoolConfig{}, schema());
  const AugmentedScene out = mix_patch_unlabeled(as_augmented(base), pools.patches,
                                                 MixMask{std::vector<bool>(4, true)}, grid2(), rng);
  EXPECT_EQ(out.scene, base);
  EXPECT_EQ(out.origin, as_augmented(base).origin);
}

TEST(MixPatch, AllReplaceTakesEveryInRangePointFromThePool) {
  Rng rng(4);
  const Scene base = micro_scene(rng, 6, 1, 100);
  const Scene donor = micro_scene(rng, 6, 2, 1);
  const Scene* d = &donor;
  const Pools pools = build_labeled_pools({&d, 1}, grid2(), PoolConfig{}, schema());
  const AugmentedScene out = mix_patch_unlabeled(as_augmented(base), pools.patches,
                                                 MixMask{std::vector<bool>(4, false)}, grid2(), rng);
  EXPECT_EQ(out.scene.size(), donor.size());
  for (const auto& o : out.origin) EXPECT_EQ(o.branch, Branch::pool_patch);
  for (ClassId c : out.scene.labels()) EXPECT_EQ(c, ClassId{2});
}

TEST(MixPatch, OutOfRangePointsAreKept) {
  Rng rng(4);
  const Scene donor = micro_scene(rng, 6, 2, 1);
  const Scene* d = &donor;
  const Pools pools = build_labeled_pools({&d, 1}, grid2(), PoolConfig{}, schema());
  const Scene base = make_scene({{0.5f, 0.5f, 0, 0}, {9.0f, 9.0f, 0, 0}}, {{1, 1}}, SceneId{7});
  const AugmentedScene out = mix_patch_unlabeled(as_augmented(base), pools.patches,
                                                 MixMask{std::vector<bool>(4, false)}, grid2(), rng);
  ASSERT_EQ(out.origin[0].branch, Branch::base);
  EXPECT_EQ(out.origin[0].point, 1u);
  EXPECT_EQ(out.scene.coords()(0, 0), 9.0f);
}

TEST(MixPatch, FourPatchProvenance) {
  Rng rng(5);
  const Scene base = micro_scene(rng, 5, 1, 100);
  const Scene donor = micro_scene(rng, 5, 2, 1);
  const Scene* d = &donor;
  const Pools pools = build_labeled_pools({&d, 1}, grid2(), PoolConfig{}, schema());
  const MixMask mask{{true, true, false, false}};  // replace {2, 3}
  const AugmentedScene out = mix_patch_unlabeled(as_augmented(base), pools.patches, mask, grid2(), rng);
  EXPECT_EQ(base_cells(out, grid2()), (std::set<std::uint32_t>{0, 1}));
  EXPECT_EQ(pool_cells(out, grid2()), (std::set<std::uint32_t>{2, 3}));
  for (std::size_t p = 0; p < out.origin.size(); ++p) {
    const auto& o = out.origin[p];
    const Scene& src = o.branch == Branch::base ? base : donor;
    EXPECT_EQ(o.scene, src.id());
    EXPECT_EQ(out.scene.coords().row(static_cast<Eigen::Index>(p)), src.coords().row(o.point));
  }
}

TEST(MixPatch, MissingPoolIndexFallsBackToBase) {
  Rng rng(6);
  const Scene base = micro_scene(rng, 5, 1, 100);
  const AugmentedScene out = mix_patch_unlabeled(as_augmented(base), PatchPool(4, PoolScope::persistent_labeled),
                                                 MixMask{std::vector<bool>(4, false)}, grid2(), rng);
  EXPECT_EQ(out.scene, base);
}

TEST(MixPatch, EmptyPseudoPoolLeavesLabeledSceneUnchanged) {
  Rng rng(6);
  const Scene labeled = micro_scene(rng, 5, 1, 100);
  const AugmentedScene out = mix_patch_labeled(labeled, PatchPool(4, PoolScope::batch_pseudo),
                                               MixMask{std::vector<bool>(4, true)}, grid2(), rng);
  EXPECT_EQ(out.scene, labeled);
}

TEST(MixPatch, WrongMaskLengthIsAConsistencyError) {
  Rng rng(6);
  const Scene base = micro_scene(rng, 5, 1, 100);
  EXPECT_THROW(mix_patch_unlabeled(as_augmented(base), PatchPool(4, PoolScope::persistent_labeled),
                                   MixMask{std::vector<bool>(3, true)}, grid2(), rng),
               ConsistencyError);
}

TEST(MixPatch, BranchesAreComplementary) {
  Rng rng(7);
  const GridSpec g{3, {0.0, 3.0}, {0.0, 3.0}};
  for (int trial = 0; trial < 50; ++trial) {
    // Random points shifted into [0, 3]^2, labels mapped away from ignore.
    auto shifted = [&](std::uint32_t id, bool labeled) {
      Scene s = random_scene(rng, 400, 3, 1.5f, labeled, SceneId{id});
      Scene::Coords c = s.coords();
      c.col(0).array() += 1.5f;
      c.col(1).array() += 1.5f;
      std::optional<Scene::Labels> l;
      if (labeled) {
        l = s.labels();
        for (auto& v : *l) v = ClassId{static_cast<std::uint16_t>(1 + v.value % 3)};
      }
      return Scene(SceneId{id}, c, s.feats(), l);
    };
    const Scene labeled = shifted(1, true);
    const Scene pseudo = shifted(2, true);
    const Scene* lp = &labeled;
    const Scene* pp = &pseudo;
    const Pools lpool = build_labeled_pools({&lp, 1}, g, PoolConfig{}, schema());
    const Pools ppool = build_pseudo_pools(std::span<const Scene* const>(&pp, 1), g, PoolConfig{}, schema());
    ASSERT_EQ(lpool.patches.total_size(), 9u);
    ASSERT_EQ(ppool.patches.total_size(), 9u);
    const MixMask mask = sample_mask(9, 0.5, rng);
    const AugmentedScene u = mix_patch_unlabeled(as_augmented(pseudo), lpool.patches, mask, g, rng);
    const AugmentedScene l = mix_patch_labeled(labeled, ppool.patches, mask, g, rng);
    const auto a = pool_cells(u, g);
    const auto b = pool_cells(l, g);
    std::set<std::uint32_t> all = a;
    all.insert(b.begin(), b.end());
    EXPECT_EQ(all.size(), 9u);
    std::vector<std::uint32_t> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    EXPECT_TRUE(both.empty());
  }
}

TEST(Aabb, BoxesAndIntersection) {
  Scene::Coords one(1, 3);
  one << 1, 2, 3;
  const Aabb single = compute_aabb(one);
  EXPECT_EQ(single.min_corner, single.max_corner);
  Scene::Coords two(2, 3);
  two << 1, 2, 3, 0, 0, 0;
  const Aabb box = compute_aabb(two);
  EXPECT_EQ(box.min_corner, Eigen::Vector3f(0, 0, 0));
  EXPECT_EQ(box.max_corner, Eigen::Vector3f(1, 2, 3));
  EXPECT_EQ(compute_aabb(two.colwise().reverse().eval()), box);
  EXPECT_THROW(compute_aabb(Scene::Coords(0, 3)), PreconditionError);

  const Aabb shifted{{2, 0, 0}, {3, 1, 1}};
  const Aabb touching{{1, 0, 0}, {2, 1, 1}};
  EXPECT_TRUE(aabb_intersects(box, box));
  EXPECT_FALSE(aabb_intersects(box, shifted));
  EXPECT_TRUE(aabb_intersects(box, touching));
}

// An instance pool holding one car under the cell containing (10, 10) for
// the default 18 x 18 grid over [-50, 50]^2.
InstancePool car_pool(const Scene& car_scene) {
  const Scene* p = &car_scene;
  return build_labeled_pools({&p, 1}, GridSpec{}, PoolConfig{}, schema()).instances;
}

Scene car_at(float x, float y, std::uint32_t id) {
  std::vector<std::array<float, 4>> rows;
  for (int i = 0; i < 8; ++i) rows.push_back({x + 0.2f * (i % 4), y + 0.3f * (i / 4), 0.5f, 0.6f});
  return make_scene(rows, std::vector<std::uint16_t>(rows.size(), 2), SceneId{id});
}

Scene ground(int n, float lo, float hi, Rng& rng, std::uint32_t id) {
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<std::array<float, 4>> rows;
  for (int i = 0; i < n; ++i) rows.push_back({u(rng), u(rng), -1.7f, 0.2f});
  return make_scene(rows, std::vector<std::uint16_t>(rows.size(), 1), SceneId{id});
}

MixConfig always_fill() {
  MixConfig c;
  c.p_fill = 1.0;
  return c;
}

TEST(InsFill, EmptyPoolLeavesSceneUnchanged) {
  Rng rng(1);
  const AugmentedScene base = as_augmented(ground(200, 5, 15, rng, 3));
  const AugmentedScene out = ins_fill(base, InstancePool(324, PoolScope::persistent_labeled),
                                      GridSpec{}, always_fill(), schema(), rng);
  EXPECT_EQ(out.scene, base.scene);
  EXPECT_EQ(out.origin, base.origin);
}

TEST(InsFill, OverlappingCandidateIsSkipped) {
  Rng rng(1);
  const Scene car = car_at(10.0f, 10.0f, 1);
  const Scene g = ground(400, 5, 15, rng, 3);
  // Base = ground plus the very same car: candidate box equals an existing box.
  SceneBuilder b(1, true);
  for (Eigen::Index p = 0; p < g.size(); ++p) b.append(g, p);
  for (Eigen::Index p = 0; p < car.size(); ++p) b.append(car, p);
  const Scene base = std::move(b).build(SceneId{3});
  FillStats stats;
  const AugmentedScene out =
      ins_fill(as_augmented(base), car_pool(car), GridSpec{}, always_fill(), schema(), rng, &stats);
  EXPECT_EQ(out.scene, base);
  EXPECT_EQ(stats.attempts, 1u);
  EXPECT_EQ(stats.rejected_overlap, 1u);
}

TEST(InsFill, SparseContextIsSkipped) {
  Rng rng(1);
  const Scene car = car_at(10.0f, 10.0f, 1);
  const Scene far = ground(400, -40, -30, rng, 3);  // nothing near (10, 10)
  FillStats stats;
  const AugmentedScene out =
      ins_fill(as_augmented(far), car_pool(car), GridSpec{}, always_fill(), schema(), rng, &stats);
  EXPECT_EQ(out.scene, far);
  EXPECT_EQ(stats.rejected_context, 1u);
}

TEST(InsFill, DenseGroundAcceptsTheInstance) {
  Rng rng(1);
  const Scene car = car_at(10.0f, 10.0f, 1);
  const Scene g = ground(400, 5, 15, rng, 3);
  const MixConfig cfg = always_fill();
  // Replay of the acceptance rule by brute force.
  const Aabb box = compute_aabb(car.coords());
  const double r = cfg.resolved_context_radius(GridSpec{});
  std::size_t near = 0;
  for (Eigen::Index p = 0; p < g.size(); ++p) {
    const double dx = g.coords()(p, 0) - box.center().x();
    const double dy = g.coords()(p, 1) - box.center().y();
    near += dx * dx + dy * dy <= r * r;
  }
  ASSERT_GE(near, cfg.context_min_points);

  const AugmentedScene out = ins_fill(as_augmented(g), car_pool(car), GridSpec{}, cfg, schema(), rng);
  ASSERT_EQ(out.scene.size(), g.size() + car.size());
  for (Eigen::Index p = 0; p < car.size(); ++p) {
    const Eigen::Index q = g.size() + p;
    EXPECT_EQ(out.scene.coords().row(q), car.coords().row(p));
    EXPECT_EQ(out.scene.labels()[static_cast<std::size_t>(q)], ClassId{2});
    EXPECT_EQ(out.origin[static_cast<std::size_t>(q)].branch, Branch::pool_instance);
    EXPECT_EQ(out.origin[static_cast<std::size_t>(q)].scene, SceneId{1});
  }
}

TEST(InsFill, ZeroFillProbabilityNeverFills) {
  Rng rng(1);
  const Scene car = car_at(10.0f, 10.0f, 1);
  const Scene g = ground(400, 5, 15, rng, 3);
  MixConfig cfg;
  cfg.p_fill = 0.0;
  EXPECT_EQ(ins_fill(as_augmented(g), car_pool(car), GridSpec{}, cfg, schema(), rng).scene, g);
}

TEST(BevRadiusIndex, MatchesBruteForceCounts) {
  Rng rng(11);
  for (double radius : {0.01, 0.5, 3.0, 40.0}) {
    const Scene s = random_scene(rng, 2000, 2, 30.0f);
    const BevRadiusIndex index(s.coords(), radius);
    std::uniform_real_distribution<double> q(-35.0, 35.0);
    for (int k = 0; k < 50; ++k) {
      const double x = q(rng), y = q(rng);
      std::size_t expect = 0;
      for (Eigen::Index p = 0; p < s.size(); ++p) {
        const double dx = s.coords()(p, 0) - x, dy = s.coords()(p, 1) - y;
        expect += dx * dx + dy * dy <= radius * radius;
      }
      EXPECT_EQ(index.count_within(x, y), expect) << "radius " << radius;
    }
  }
}

TEST(MixAndFill, SameSeedSameOutput) {
  Rng rng(2);
  std::vector<Scene> scenes;
  for (std::uint32_t i = 0; i < 4; ++i) scenes.push_back(random_scene(rng, 3000, 4, 50.0f, true, SceneId{i}));
  std::vector<const Scene*> ptrs;
  for (const auto& s : scenes) ptrs.push_back(&s);
  const Pools pools = build_labeled_pools(ptrs, GridSpec{}, PoolConfig{}, schema());
  const auto a = mix_and_fill(as_augmented(scenes[0]), pools, GridSpec{}, MixConfig{}, schema(), 9);
  const auto b = mix_and_fill(as_augmented(scenes[0]), pools, GridSpec{}, MixConfig{}, schema(), 9);
  EXPECT_EQ(a.scene, b.scene);
  EXPECT_EQ(a.origin, b.origin);
  const auto c = mix_and_fill(as_augmented(scenes[0]), pools, GridSpec{}, MixConfig{}, schema(), 10);
  EXPECT_FALSE(c.scene == a.scene);
}

}  // namespace
}  // namespace aiscene

#include <gtest/gtest.h>

#include "aiscene/errors.hpp"
#include "aiscene/synthetic.hpp"
#include "aiscene/trainer.hpp"
#include "test_util.hpp"

namespace aiscene {
namespace {

struct Fixture {
  std::vector<Scene> labeled;
  std::vector<Scene> unlabeled;
  std::vector<const Scene*> lab_ptrs;
  std::vector<const Scene*> unl_ptrs;
  LabelSchema schema = synthetic_schema();
  TrainConfig config;
  Pools pools;

  Fixture() {
    SyntheticSpec spec = synthetic_benchmark_spec();
    spec.ground_points = 600;
    for (std::uint64_t i = 0; i < 2; ++i) {
      labeled.push_back(generate_synthetic_scene(spec, i));
      unlabeled.push_back(generate_synthetic_scene(spec, 100 + i).without_labels());
    }
    for (auto& s : labeled) lab_ptrs.push_back(&s);
    for (auto& s : unlabeled) unl_ptrs.push_back(&s);
    config.grid = GridSpec{6, {-30.0, 30.0}, {-30.0, 30.0}};
    config.learning_rate = 0.5;
    pools = build_labeled_pools(lab_ptrs, config.grid, config.pool, schema);
  }
};

ParamVector warm_params(const ToySegmentor& model, const Fixture& f) {
  // A few supervised steps so the teacher is confident somewhere.
  ParamVector theta = model.initial_params();
  for (int k = 0; k < 30; ++k) {
    theta -= 0.5 * model.loss_and_grad(f.labeled[0], f.labeled[0].labels(), ClassId{0}, theta).grad;
  }
  return theta;
}

TEST(TrainIteration, UnreachableThresholdDisablesTheUnlabeledLoss) {
  Fixture f;
  f.config.tau_s = 1.01;
  const ToySegmentor model(6);
  TrainState state = initial_state(model);
  state.student = state.teacher = warm_params(model, f);
  Rng rng(1);
  const IterationResult r =
      train_iteration(state, model, f.lab_ptrs, f.unl_ptrs, f.pools, f.config, f.schema, rng);
  EXPECT_EQ(r.log.loss_u, 0.0);
  EXPECT_EQ(r.log.erase_fraction, 1.0);
  EXPECT_EQ(r.log.pseudo_patches, 0u);
  // Empty pseudo pools leave the labeled branch equal to the raw scene.
  EXPECT_DOUBLE_EQ(r.log.loss_l, r.log.loss_s);
}

TEST(TrainIteration, AllComponentsOffIsAPlainSupervisedStep) {
  Fixture f;
  f.config = supervised_only(f.config);
  const ToySegmentor model(6);
  TrainState state = initial_state(model);
  state.student = warm_params(model, f);
  state.teacher = ParamVector::Zero(state.student.size());
  Rng rng(2);
  const IterationResult r =
      train_iteration(state, model, f.lab_ptrs, f.unl_ptrs, f.pools, f.config, f.schema, rng);

  ParamVector grad = ParamVector::Zero(state.student.size());
  double loss = 0.0;
  for (const Scene* s : f.lab_ptrs) {
    const LossAndGrad lg = model.loss_and_grad(*s, s->labels(), ClassId{0}, state.student);
    grad += lg.grad / 2.0;
    loss += lg.loss / 2.0;
  }
  const ParamVector student = state.student - f.config.learning_rate * grad;
  EXPECT_LT((r.state.student - student).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((r.state.teacher - 0.01 * student).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(r.log.loss_s, loss, 1e-12);
  EXPECT_EQ(r.log.loss_u, 0.0);
  EXPECT_EQ(r.log.loss_l, 0.0);
  EXPECT_DOUBLE_EQ(r.log.loss_total, r.log.loss_s);
  EXPECT_EQ(r.state.step, 1u);
}

TEST(TrainIteration, WorkerCountDoesNotChangeResults) {
  Fixture f;
  const ToySegmentor model(6);
  TrainState state = initial_state(model);
  state.student = state.teacher = warm_params(model, f);
  Rng a(3), b(3);
  const IterationResult r1 =
      train_iteration(state, model, f.lab_ptrs, f.unl_ptrs, f.pools, f.config, f.schema, a);
  f.config.workers = 3;
  const IterationResult r2 =
      train_iteration(state, model, f.lab_ptrs, f.unl_ptrs, f.pools, f.config, f.schema, b);
  EXPECT_EQ(r1.log, r2.log);
  EXPECT_EQ(r1.state.student, r2.state.student);
  EXPECT_EQ(r1.state.teacher, r2.state.teacher);
  EXPECT_GT(r1.log.loss_u, 0.0);
  EXPECT_GT(r1.log.pseudo_patches, 0u);
}

TEST(TrainIteration, ConsistencyTermIsLoggedWhenEnabled) {
  Fixture f;
  f.config.weights.consistency_weight = 10.0;
  const ToySegmentor model(6);
  TrainState state = initial_state(model);
  state.student = warm_params(model, f);
  state.teacher = ParamVector::Zero(state.student.size());
  Rng rng(4);
  const IterationResult r =
      train_iteration(state, model, f.lab_ptrs, f.unl_ptrs, f.pools, f.config, f.schema, rng);
  EXPECT_GT(r.log.loss_c, 0.0);
  EXPECT_NEAR(r.log.loss_total,
              r.log.loss_s + r.log.loss_u + r.log.loss_l + 10.0 * r.log.loss_c, 1e-12);
}

TEST(TrainIteration, RejectsMismatchedBatches) {
  Fixture f;
  const ToySegmentor model(6);
  Rng rng(1);
  std::vector<const Scene*> one{f.unl_ptrs[0]};
  EXPECT_THROW(train_iteration(initial_state(model), model, f.lab_ptrs, one, f.pools, f.config,
                               f.schema, rng),
               PreconditionError);
}

TEST(TrainConfig, ValidatesRanges) {
  TrainConfig c;
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = TrainConfig{};
  c.ema.alpha = 1.0;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = TrainConfig{};
  c.mix.rho_mix = 2.0;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = TrainConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), PreconditionError);
}

Dataset small_split() {
  SyntheticSpec spec = synthetic_benchmark_spec();
  spec.ground_points = 400;
  std::vector<Dataset::ScenePtr> scenes;
  for (std::uint32_t i = 0; i < 12; ++i) {
    scenes.push_back(std::make_shared<const Scene>(generate_synthetic_scene(spec, i).with_id(SceneId{i})));
  }
  return split_dataset(Dataset(std::move(scenes), synthetic_schema()), 0.25, 1);
}

TEST(Train, SameSeedSameRunDifferentSeedDifferentRun) {
  const Dataset ds = small_split();
  const ToySegmentor model(6);
  TrainConfig c;
  c.iterations = 15;
  c.seed = 5;
  std::vector<IterationLog> streamed;
  const TrainingRun a = train(ds, model, c, [&](const IterationLog& l) { streamed.push_back(l); });
  const TrainingRun b = train(ds, model, c);
  EXPECT_EQ(a.logs.size(), 15u);
  EXPECT_EQ(a.logs, streamed);
  EXPECT_EQ(a.logs, b.logs);
  EXPECT_EQ(a.state.student, b.state.student);
  EXPECT_EQ(a.state.teacher, b.state.teacher);
  EXPECT_EQ(a.state.step, 15u);
  c.seed = 6;
  EXPECT_NE(train(ds, model, c).state.student, a.state.student);
}

TEST(Train, ZeroInitialTeacherErasesEverythingAtFirst) {
  const Dataset ds = small_split();
  const ToySegmentor model(6);
  TrainConfig c;
  c.iterations = 1;
  const TrainingRun r = train(ds, model, c);
  EXPECT_EQ(r.logs[0].erase_fraction, 1.0);
  EXPECT_EQ(r.logs[0].loss_u, 0.0);
}

TEST(Train, NeedsUnlabeledScenesOnlyWhenComponentsAreOn) {
  SyntheticSpec spec = synthetic_benchmark_spec();
  spec.ground_points = 200;
  std::vector<Dataset::ScenePtr> scenes{std::make_shared<const Scene>(generate_synthetic_scene(spec, 1))};
  const Dataset ds(scenes, synthetic_schema());
  const ToySegmentor model(6);
  TrainConfig c;
  c.iterations = 2;
  EXPECT_THROW(train(ds, model, c), PreconditionError);
  EXPECT_NO_THROW(train(ds, model, supervised_only(c)));
}

}  // namespace
}  // namespace aiscene

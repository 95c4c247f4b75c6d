#include "aiscene/trainer.hpp"

#include <algorithm>
#include <thread>

#include "aiscene/errors.hpp"

namespace aiscene {

void TrainConfig::validate() const {
  if (!(tau_s >= 0.0)) throw PreconditionError("train: tau_s must be >= 0");
  ema.validate();
  weights.validate();
  grid.validate();
  pool.validate();
  mix.validate();
  if (!(learning_rate > 0.0)) {
    throw PreconditionError("train: learning_rate must be > 0");
  }
  if (batch_size < 1) throw PreconditionError("train: batch_size must be >= 1");
  if (workers < 1) throw PreconditionError("train: workers must be >= 1");
}

TrainState initial_state(const Segmentor& segmentor) {
  TrainState s;
  s.student = segmentor.initial_params();
  s.teacher = s.student;
  return s;
}

TrainConfig supervised_only(TrainConfig config) {
  config.components = {false, false, false};
  return config;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

struct PairOutcome {
  double loss_s = 0.0;
  double loss_l = 0.0;
  double loss_u = 0.0;
  double loss_c = 0.0;
  ParamVector grad;
};

}  // namespace

IterationResult train_iteration(TrainState state, const Segmentor& segmentor,
                                std::span<const Scene* const> labeled,
                                std::span<const Scene* const> unlabeled,
                                const Pools& labeled_pools,
                                const TrainConfig& config,
                                const LabelSchema& schema, Rng& rng) {
  config.validate();
  if (labeled.empty() || labeled.size() != unlabeled.size()) {
    throw PreconditionError("train_iteration: batches must be non-empty and equal-sized");
  }
  const std::size_t b = labeled.size();
  const auto& sw = config.components;
  const bool use_unlabeled = sw.any();
  const auto ignore = schema.ignore_class();
  const ClassId ignore_id = ignore.value_or(ClassId{0});
  // One seed per iteration; every pair derives its own streams from it, so
  // results do not depend on the worker count.
  const std::uint64_t iter_seed = rng();

  IterationLog log;
  log.step = state.step;
  log.labeled_patches = labeled_pools.patches.total_size();
  log.labeled_instances = labeled_pools.instances.total_size();

  // Teacher pass and erasure for every unlabeled scene of the batch.
  std::vector<ErasedScene> erased(b);
  std::vector<Scene> relabeled(b);
  std::vector<PointProbs> teacher_probs(b);
  std::size_t total_points = 0;
  std::size_t removed_points = 0;
  if (use_unlabeled || config.weights.consistency_weight > 0.0) {
    parallel_for(b, config.workers, [&](std::size_t i) {
      teacher_probs[i] = segmentor.predict(*unlabeled[i], state.teacher);
      const PseudoLabels pseudo = pseudo_label(teacher_probs[i]);
      erased[i] = erase(*unlabeled[i], pseudo, config.tau_s, ignore);
      if (!sw.pt_erase) {
        relabeled[i] =
            pseudo_labeled_scene(*unlabeled[i], pseudo, config.tau_s, ignore_id);
      }
    });
    for (const auto& e : erased) {
      total_points += e.stats.total_points;
      removed_points += e.stats.removed_points;
    }
  }
  log.erase_fraction = total_points == 0
                           ? 0.0
                           : static_cast<double>(removed_points) /
                                 static_cast<double>(total_points);

  Pools pseudo_pools{PatchPool(config.grid.num_patches(), PoolScope::batch_pseudo),
                     InstancePool(config.grid.num_patches(), PoolScope::batch_pseudo)};
  if (use_unlabeled && sw.augment()) {
    if (sw.pt_erase) {
      pseudo_pools = build_pseudo_pools(erased, config.grid, config.pool, schema);
    } else {
      std::vector<const Scene*> ptrs;
      for (const auto& s : relabeled) ptrs.push_back(&s);
      pseudo_pools = build_pseudo_pools(ptrs, config.grid, config.pool, schema);
    }
  }
  log.pseudo_patches = pseudo_pools.patches.total_size();
  log.pseudo_instances = pseudo_pools.instances.total_size();

  std::vector<PairOutcome> outcomes(b);
  parallel_for(b, config.workers, [&](std::size_t i) {
    Rng pair_rng = derive_rng(iter_seed, i);
    PairOutcome& out = outcomes[i];
    const Scene& xl = *labeled[i];

    LossAndGrad ls = segmentor.loss_and_grad(xl, xl.labels(), ignore, state.student);
    out.loss_s = ls.loss;
    out.grad = ls.grad;

    const MixMask mask = sample_mask(config.grid.num_patches(),
                                     config.mix.rho_mix, pair_rng);

    // An unlabeled scene without a single confident point gives no pseudo
    // supervision, so its branch is skipped entirely (L_u = 0).
    const bool has_pseudo =
        use_unlabeled &&
        (sw.pt_erase ? !erased[i].scene.empty()
                     : std::any_of(relabeled[i].labels().begin(),
                                   relabeled[i].labels().end(),
                                   [&](ClassId c) { return c != ignore_id; }));
    if (has_pseudo) {
      AugmentedScene xu = sw.pt_erase ? as_augmented(erased[i])
                                      : as_augmented(relabeled[i]);
      if (sw.mix_patch) {
        xu = mix_patch_unlabeled(xu, labeled_pools.patches, mask, config.grid,
                                 pair_rng);
      }
      if (sw.ins_fill) {
        xu = ins_fill(xu, labeled_pools.instances, config.grid, config.mix,
                      schema, pair_rng);
      }
      LossAndGrad lu = segmentor.loss_and_grad(xu.scene, xu.scene.labels(),
                                               ignore, state.student);
      out.loss_u = lu.loss;
      out.grad += config.weights.lambda_u * lu.grad;
    }

    if (use_unlabeled && sw.augment()) {
      AugmentedScene xlp = as_augmented(xl);
      if (sw.mix_patch) {
        xlp = mix_patch_labeled(xlp, pseudo_pools.patches, mask, config.grid,
                                pair_rng);
      }
      if (sw.ins_fill) {
        xlp = ins_fill(xlp, pseudo_pools.instances, config.grid, config.mix,
                       schema, pair_rng);
      }
      LossAndGrad ll = segmentor.loss_and_grad(xlp.scene, xlp.scene.labels(),
                                               ignore, state.student);
      out.loss_l = ll.loss;
      out.grad += config.weights.lambda_l * ll.grad;
    }

    if (config.weights.consistency_weight > 0.0) {
      LossAndGrad lc = segmentor.consistency_and_grad(
          *unlabeled[i], teacher_probs[i], state.student);
      out.loss_c = lc.loss;
      out.grad += config.weights.consistency_weight * lc.grad;
    }
  });

  ParamVector grad = ParamVector::Zero(state.student.size());
  for (const PairOutcome& o : outcomes) {
    grad += o.grad;
    log.loss_s += o.loss_s;
    log.loss_l += o.loss_l;
    log.loss_u += o.loss_u;
    log.loss_c += o.loss_c;
  }
  const double inv_b = 1.0 / static_cast<double>(b);
  grad *= inv_b;
  log.loss_s *= inv_b;
  log.loss_l *= inv_b;
  log.loss_u *= inv_b;
  log.loss_c *= inv_b;
  log.loss_total = total_loss(log.loss_s, log.loss_u, log.loss_l,
                              config.weights, log.loss_c);
  if (!grad.allFinite()) throw NumericError("train_iteration: non-finite gradient");

  state.student -= config.learning_rate * grad;
  if (!state.student.allFinite()) {
    throw NumericError("train_iteration: parameters diverged (non-finite)");
  }
  state.teacher = ema_update(state.teacher, state.student, config.ema.alpha);
  ++state.step;
  return {std::move(state), log};
}

TrainingRun train(const Dataset& dataset, const Segmentor& segmentor,
                  const TrainConfig& config,
                  const std::function<void(const IterationLog&)>& on_log) {
  config.validate();
  const auto& lab_ids = dataset.labeled_ids();
  const auto& unl_ids = dataset.unlabeled_ids();
  if (lab_ids.empty()) throw PreconditionError("train: no labeled scenes");
  const bool needs_unlabeled =
      config.components.any() || config.weights.consistency_weight > 0.0;
  if (needs_unlabeled && unl_ids.empty()) {
    throw PreconditionError("train: no unlabeled scenes");
  }

  std::vector<const Scene*> labeled_scenes;
  for (std::size_t i : lab_ids) labeled_scenes.push_back(&dataset.training_scene(i));
  const Pools pools = config.components.any() && config.components.augment()
                          ? build_labeled_pools(labeled_scenes, config.grid,
                                                config.pool, dataset.schema())
                          : Pools{PatchPool(config.grid.num_patches(),
                                            PoolScope::persistent_labeled),
                                  InstancePool(config.grid.num_patches(),
                                               PoolScope::persistent_labeled)};

  TrainingRun run;
  run.state = initial_state(segmentor);
  run.logs.reserve(config.iterations);
  Rng rng = derive_rng(config.seed, 0);
  std::vector<const Scene*> lab_batch(config.batch_size);
  std::vector<const Scene*> unl_batch(config.batch_size);
  std::uniform_int_distribution<std::size_t> pick_l(0, lab_ids.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_u(
      0, unl_ids.empty() ? 0 : unl_ids.size() - 1);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (std::size_t k = 0; k < config.batch_size; ++k) {
      lab_batch[k] = &dataset.training_scene(lab_ids[pick_l(rng)]);
      // Without unlabeled data the unlabeled slot is never read.
      unl_batch[k] = unl_ids.empty()
                         ? lab_batch[k]
                         : &dataset.training_scene(unl_ids[pick_u(rng)]);
    }
    IterationResult r = train_iteration(std::move(run.state), segmentor,
                                        lab_batch, unl_batch, pools, config,
                                        dataset.schema(), rng);
    run.state = std::move(r.state);
    if (on_log) on_log(r.log);
    run.logs.push_back(r.log);
  }
  return run;
}

}  // namespace aiscene

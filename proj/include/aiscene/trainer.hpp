#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "aiscene/dataset.hpp"
#include "aiscene/ema.hpp"
#include "aiscene/erasure.hpp"
#include "aiscene/grid.hpp"
#include "aiscene/losses.hpp"
#include "aiscene/metrics.hpp"
#include "aiscene/mixing.hpp"
#include "aiscene/pools.hpp"
#include "aiscene/segmentor.hpp"

namespace aiscene {

/// Which parts of the pipeline are active. With all three off the iteration
/// is a plain supervised step on the labeled batch.
struct ComponentSwitches {
  bool pt_erase = true;
  bool mix_patch = true;
  bool ins_fill = true;

  bool any() const { return pt_erase || mix_patch || ins_fill; }
  bool augment() const { return mix_patch || ins_fill; }
};

struct TrainConfig {
  double tau_s = kDefaultTauS;
  EmaConfig ema;
  LossWeights weights;
  GridSpec grid;
  PoolConfig pool;
  MixConfig mix;
  ComponentSwitches components;
  double learning_rate = 0.5;
  std::size_t batch_size = 2;
  std::size_t iterations = 2000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  void validate() const;
};

struct TrainState {
  ParamVector student;
  ParamVector teacher;
  std::uint64_t step = 0;
};

/// Teacher starts as a copy of the student.
TrainState initial_state(const Segmentor& segmentor);

struct IterationLog {
  std::uint64_t step = 0;
  double loss_s = 0.0;
  double loss_l = 0.0;
  double loss_u = 0.0;
  double loss_c = 0.0;
  double loss_total = 0.0;
  double erase_fraction = 0.0;
  std::size_t labeled_patches = 0;
  std::size_t labeled_instances = 0;
  std::size_t pseudo_patches = 0;
  std::size_t pseudo_instances = 0;

  friend bool operator==(const IterationLog&, const IterationLog&) = default;
};

struct IterationResult {
  TrainState state;
  IterationLog log;
};

/// One teacher-student step over paired batches (labeled[i] with
/// unlabeled[i]):
///   teacher predict -> pseudo_label -> erase -> batch pseudo pools ->
///   sample_mask -> MixPatch + InsFill on both branches -> student losses
///   L_s (raw labeled), L_l (augmented labeled), L_u (augmented unlabeled)
///   -> gradient step on the weighted sum -> EMA teacher update.
/// Losses are averaged over pairs. A pair whose unlabeled scene keeps no
/// confident point contributes L_u = 0. L_u is computed only when some
/// component is enabled and L_l only when MixPatch or InsFill is.
/// Throws PreconditionError on empty or unequal batches.
IterationResult train_iteration(TrainState state, const Segmentor& segmentor,
                                std::span<const Scene* const> labeled,
                                std::span<const Scene* const> unlabeled,
                                const Pools& labeled_pools,
                                const TrainConfig& config,
                                const LabelSchema& schema, Rng& rng);

struct TrainingRun {
  TrainState state;
  std::vector<IterationLog> logs;
};

/// Full loop over `config.iterations` steps on a split dataset. Batches are
/// drawn uniformly with replacement from the labeled and unlabeled ids.
/// The labeled pools are built once up front.
TrainingRun train(const Dataset& dataset, const Segmentor& segmentor,
                  const TrainConfig& config,
                  const std::function<void(const IterationLog&)>& on_log = {});

/// Labeled-only baseline configuration derived from `config`.
TrainConfig supervised_only(TrainConfig config);

}  // namespace aiscene

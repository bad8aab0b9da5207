#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "swarmlab/datagen.hpp"
#include "swarmlab/policy_net.hpp"

namespace swarmlab {

struct CurriculumStage {
    int stage_id = 0;  // 1-based
    char group = 'A';
    double visibility_ratio = 0.5;
    int epochs = 0;
    int steps = 0;          // rollout length per environment
    int environments = 0;   // constellations per stage
    double learning_rate = 0.0;
};

/// The 14-stage curriculum: groups A (easy ratios, lr 5e-5), B and C
/// (progressively tighter ratios, lr 5e-6, C with longer rollouts and more
/// environments).
const std::vector<CurriculumStage>& builtin_curriculum();

struct AdamState {
    std::vector<double> m, v;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update in place.
void adam_update(std::vector<double>& params, const std::vector<double>& grads, AdamState& opt,
                 double learning_rate);

struct TrainStepResult {
    double loss = 0.0;
    double lambda2 = 0.0;
    double task_value = 0.0;
    std::vector<double> param_grads;
    SwarmState next_state;
};

/// One-step lookahead: every agent acts on the current state, the loss is
/// evaluated on the resulting state, and the gradient flows back through the
/// actions into the network. No gradient flows through the current
/// positions, so rollouts never backpropagate through time.
TrainStepResult train_step(const PolicyNet& net, const SwarmState& state, double visibility,
                           double alpha, double beta, double s_max);

struct TrainOptions {
    double visibility = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double s_max = 0.05;
    std::uint64_t seed = 0;
    std::string checkpoint_dir;   // empty: no checkpoints
    std::ostream* log = nullptr;  // CSV rows, one per environment pass
};

/// One curriculum stage over a pre-generated dataset: per epoch, visit the
/// environments in a seeded shuffled order; per environment, roll the
/// current policy `steps` times from its initial constellation, average the
/// per-step gradients, and apply a single Adam update.
void train_stage(PolicyNet& net, const CurriculumStage& stage, const Dataset& data,
                 AdamState& opt, const TrainOptions& opt_train);

/// Run stages in order with one optimizer. Stage datasets are generated on
/// the fly from base_cfg with the stage's visibility ratio and seed
/// base seed + 1000 * stage_id. Checkpoints land in
/// checkpoint_dir/stage_XX.json when a directory is set.
PolicyNet run_curriculum(PolicyNet net, const std::vector<CurriculumStage>& stages,
                         const GeneratorConfig& base_cfg, const TrainOptions& opt_train);

/// Header for the CSV rows written to TrainOptions::log.
extern const char* const kTrainLogHeader;

}  // namespace swarmlab

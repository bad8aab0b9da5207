#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "swarmlab/geometry.hpp"
#include "swarmlab/policy_net.hpp"

namespace swarmlab {

inline constexpr double kDefaultSMaxFactor = 0.05;   // s_max = 0.05 * visibility
inline constexpr double kDefaultConvFactor = 0.5;    // conv_threshold = 0.5 * visibility
inline constexpr int kDefaultMaxSteps = 2500;

/// Which decision rule drives the agents. The analytical rule needs no
/// network; the network rule wraps a PolicyNet in t_pre/t_post.
struct Controller {
    enum class Kind { kAnalytical, kNetwork };
    Kind kind = Kind::kAnalytical;
    const PolicyNet* net = nullptr;  // required when kind == kNetwork
    double s_max = kDefaultSMaxFactor;
};

/// Smallest circular sector containing all bearings: complement of the
/// largest angular gap between consecutive sorted bearings.
struct SectorResult {
    double angle = 0.0;  // radians, [0, 2*pi)
    Vec2 boundary_a{1.0, 0.0};
    Vec2 boundary_b{1.0, 0.0};
};

SectorResult smallest_enclosing_sector(const Observation& obs);

/// Geometric baseline rule: move along the bisector of the enclosing sector
/// when it is narrower than pi, stay put otherwise. A single neighbor gets a
/// full step toward it.
Action analytical_action(const Observation& obs);

/// Full network pipeline: canonical frame in, world-frame action out.
/// Empty observations give the stationary action.
Action network_action(const PolicyNet& net, const Observation& obs);

Action controller_action(const Controller& c, const Observation& obs);

/// Synchronous update: every agent observes the same state, then all move.
SwarmState step(const SwarmState& state, const Controller& c, double visibility);

struct StepRecord {
    double max_centroid_dist = 0.0;
    int n_components = 1;
    double largest_fraction = 1.0;
};

/// Entry k summarizes the state after k steps; entry 0 is the initial state.
struct Trajectory {
    std::vector<StepRecord> records;
    std::vector<std::vector<Vec2>> positions;  // filled only when requested
};

struct ScenarioResult {
    bool converged = false;
    std::optional<int> convergence_step;
    bool stayed_connected = true;
    std::optional<int> first_disconnection_step;
    double largest_fraction_final = 1.0;
    int steps_executed = 0;
};

struct RolloutOptions {
    int max_steps = kDefaultMaxSteps;
    double conv_threshold = kDefaultConvFactor;  // absolute, same units as positions
    bool record_positions = false;
};

/// Run until converged (maximum centroid distance at or below the threshold
/// while connected) or the step cap. Disconnection does not stop the run.
std::pair<ScenarioResult, Trajectory> rollout(const SwarmState& initial, const Controller& c,
                                              double visibility, const RolloutOptions& opt);

}  // namespace swarmlab

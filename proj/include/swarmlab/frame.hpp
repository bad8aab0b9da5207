#pragma once

#include <optional>

#include "swarmlab/geometry.hpp"

namespace swarmlab {

/// Movement command: unit direction plus a step-size fraction in [0, 1].
/// The stationary command is direction (1, 0) with step_size 0.
struct Action {
    Vec2 direction{1.0, 0.0};
    double step_size = 0.0;
};

/// Rotation between the world frame and the observation's canonical frame,
/// whose x-axis points along the mean bearing direction. Degenerate
/// observations (zero bearing sum, including empty ones) get the identity.
/// cos/sin are stored directly as the mean-direction components; no trig is
/// evaluated on the data path, which keeps exact input rotations exact.
struct FrameRotation {
    double theta_star = 0.0;  // signed angle in (-pi, pi], sign(0) := +1
    double cos_theta = 1.0;
    double sin_theta = 0.0;
    bool degenerate = true;
};

/// Normalized bearing sum, or nullopt when the sum is exactly zero.
/// Accumulated with canonical_sum, so the result is bit-identical under
/// bearing permutations and exactly sign-symmetric.
std::optional<Vec2> mean_direction(const Observation& obs);

FrameRotation frame_of(const Observation& obs);

/// Rotate the observation by -theta* into the canonical frame of `f`.
/// Identity when the frame is degenerate.
Observation t_pre(const Observation& obs, const FrameRotation& f);

/// Rotate an action by +theta* back into the world frame.
Action t_post(const Action& a, const FrameRotation& f);

}  // namespace swarmlab

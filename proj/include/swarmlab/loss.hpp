#pragma once

#include <vector>

#include "swarmlab/geometry.hpp"
#include "swarmlab/jacobi.hpp"

namespace swarmlab {

inline constexpr double kCohesivenessEpsilon = 1e-6;
inline constexpr double kSpectralGapTol = 1e-8;

/// Proximity-weighted visibility graph: A_ij = visibility - d(p_i, p_j) on
/// visible pairs (coincident pairs get the maximal weight), L = D - A.
struct WeightedVisibilityGraph {
    int n = 0;
    double visibility = 0.0;
    SymMatrix adjacency;
    SymMatrix laplacian;
};

struct SpectralResult {
    double lambda2 = 0.0;
    std::vector<double> fiedler;  // unit norm, orthogonal to the all-ones vector
    bool gap_flag = false;        // lambda3 - lambda2 below the spectral-gap tolerance
};

/// Scalar value with its gradient w.r.t. every agent position.
struct LossValue {
    double value = 0.0;
    std::vector<Vec2> grad;
};

WeightedVisibilityGraph weighted_laplacian(const SwarmState& state, double visibility);

/// Second-smallest Laplacian eigenvalue and its eigenvector. Requires n >= 2.
SpectralResult algebraic_connectivity(const WeightedVisibilityGraph& g);

/// d lambda2 / d positions via the Fiedler vector: each edge contributes
/// (v_i - v_j)^2 through its weight, and d w_ij / d p_i = -(p_i - p_j)/d.
std::vector<Vec2> lambda2_position_grad(const SwarmState& state, double visibility);

/// alpha-side term: 1 / (lambda2 + epsilon), differentiable everywhere the
/// spectrum is simple. Requires n >= 2.
LossValue cohesiveness_loss(const SwarmState& state, double visibility);

/// beta-side term: largest distance from any agent to the centroid.
LossValue task_loss(const SwarmState& state);

struct TotalLoss {
    LossValue total;
    double cohesiveness_value = 0.0;  // unweighted
    double task_value = 0.0;          // unweighted
    double lambda2 = 0.0;
};

/// alpha * cohesiveness + beta * task. Single agents have no cohesiveness
/// term; weights of zero skip the corresponding computation.
TotalLoss total_loss(const SwarmState& state, double visibility, double alpha, double beta);

/// Cheeger-style lower bound h(G) >= lambda2 / 2.
double cheeger_lower_bound(const WeightedVisibilityGraph& g);

}  // namespace swarmlab

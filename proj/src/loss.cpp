#include "swarmlab/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarmlab {

WeightedVisibilityGraph weighted_laplacian(const SwarmState& state, double visibility) {
    const int n = state.size();
    WeightedVisibilityGraph g;
    g.n = n;
    g.visibility = visibility;
    g.adjacency = SymMatrix(n);
    g.laplacian = SymMatrix(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = distance(state.positions[i], state.positions[j]);
            if (d > visibility) continue;
            const double w = visibility - d;  // d == 0 gets the maximal weight
            g.adjacency.at(i, j) = w;
            g.adjacency.at(j, i) = w;
        }
    }
    for (int i = 0; i < n; ++i) {
        double deg = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            deg += g.adjacency.at(i, j);
            g.laplacian.at(i, j) = -g.adjacency.at(i, j);
        }
        g.laplacian.at(i, i) = deg;
    }
    return g;
}

SpectralResult algebraic_connectivity(const WeightedVisibilityGraph& g) {
    const int n = g.n;
    if (n < 2) throw std::invalid_argument("algebraic_connectivity: need at least 2 agents");

    const EigenDecomposition eig = jacobi_eigen(g.laplacian);
    SpectralResult out;
    out.lambda2 = std::max(eig.values[1], 0.0);
    out.gap_flag = n >= 3 && (eig.values[2] - eig.values[1]) <
                                 kSpectralGapTol * std::max(1.0, eig.values[n - 1]);

    // Project the candidate eigenvector against the all-ones direction. For a
    // disconnected graph the two zero eigenvectors come out in arbitrary
    // order, so fall back to the first one if the second is mostly constant.
    auto remainder = [n](std::vector<double> v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        double nn = 0.0;
        for (double& x : v) {
            x -= mean;
            nn += x * x;
        }
        return std::pair(std::move(v), std::sqrt(nn));
    };
    auto [v, vn] = remainder(eig.vectors[1]);
    if (vn * vn < 0.5) {
        auto [w, wn] = remainder(eig.vectors[0]);
        if (wn > vn) {
            v = std::move(w);
            vn = wn;
        }
    }
    for (double& x : v) x /= vn;
    for (double x : v) {
        if (std::fabs(x) > 1e-12) {
            if (x < 0.0)
                for (double& y : v) y = -y;
            break;
        }
    }
    out.fiedler = std::move(v);
    return out;
}

namespace {

struct SpectralGrad {
    SpectralResult spec;
    std::vector<Vec2> grad;
};

SpectralGrad spectral_grad(const SwarmState& state, double visibility) {
    SpectralGrad out;
    const WeightedVisibilityGraph g = weighted_laplacian(state, visibility);
    out.spec = algebraic_connectivity(g);
    const std::vector<double>& v = out.spec.fiedler;
    out.grad.assign(state.size(), {0.0, 0.0});
    for (int i = 0; i < g.n; ++i) {
        for (int j = i + 1; j < g.n; ++j) {
            const double d = distance(state.positions[i], state.positions[j]);
            if (d > visibility || d == 0.0) continue;
            const double w_sens = (v[i] - v[j]) * (v[i] - v[j]);
            const Vec2 u = (state.positions[i] - state.positions[j]) / d;
            const Vec2 gi = u * (-w_sens);  // weight falls as the pair separates
            out.grad[i] += gi;
            out.grad[j] += gi * -1.0;
        }
    }
    return out;
}

}  // namespace

std::vector<Vec2> lambda2_position_grad(const SwarmState& state, double visibility) {
    return spectral_grad(state, visibility).grad;
}

LossValue cohesiveness_loss(const SwarmState& state, double visibility) {
    const SpectralGrad sg = spectral_grad(state, visibility);
    LossValue out;
    out.value = 1.0 / (sg.spec.lambda2 + kCohesivenessEpsilon);
    const double factor = -out.value * out.value;
    out.grad.resize(state.size());
    for (int i = 0; i < state.size(); ++i) out.grad[i] = sg.grad[i] * factor;
    return out;
}

LossValue task_loss(const SwarmState& state) {
    const int n = state.size();
    const Vec2 c = centroid(state);
    int worst = 0;
    double r = -1.0;
    for (int i = 0; i < n; ++i) {
        const double d = distance(state.positions[i], c);
        if (d > r) {
            r = d;
            worst = i;
        }
    }
    LossValue out;
    out.value = r;
    out.grad.assign(n, {0.0, 0.0});
    if (r > 0.0) {
        const Vec2 u = (state.positions[worst] - c) / r;
        const double inv_n = 1.0 / n;
        for (int i = 0; i < n; ++i)
            out.grad[i] = u * ((i == worst ? 1.0 : 0.0) - inv_n);
    }
    return out;
}

TotalLoss total_loss(const SwarmState& state, double visibility, double alpha, double beta) {
    const int n = state.size();
    TotalLoss out;
    out.total.grad.assign(n, {0.0, 0.0});
    if (alpha != 0.0 && n >= 2) {
        const SpectralGrad sg = spectral_grad(state, visibility);
        out.lambda2 = sg.spec.lambda2;
        out.cohesiveness_value = 1.0 / (sg.spec.lambda2 + kCohesivenessEpsilon);
        const double factor = -alpha * out.cohesiveness_value * out.cohesiveness_value;
        for (int i = 0; i < n; ++i) out.total.grad[i] += sg.grad[i] * factor;
    }
    if (beta != 0.0) {
        const LossValue task = task_loss(state);
        out.task_value = task.value;
        for (int i = 0; i < n; ++i) out.total.grad[i] += task.grad[i] * beta;
    } else {
        out.task_value = task_loss(state).value;  // still reported for logs
    }
    out.total.value = alpha * out.cohesiveness_value + beta * out.task_value;
    return out;
}

double cheeger_lower_bound(const WeightedVisibilityGraph& g) {
    return algebraic_connectivity(g).lambda2 / 2.0;
}

}  // namespace swarmlab

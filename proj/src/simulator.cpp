#include "swarmlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "swarmlab/frame.hpp"

namespace swarmlab {

SectorResult smallest_enclosing_sector(const Observation& obs) {
    if (obs.empty())
        throw std::invalid_argument("smallest_enclosing_sector: empty observation");
    const int n = obs.size();
    std::vector<std::pair<double, int>> ang(n);
    for (int j = 0; j < n; ++j) ang[j] = {std::atan2(obs.bearings[j].y, obs.bearings[j].x), j};
    std::sort(ang.begin(), ang.end());

    SectorResult out;
    if (n == 1) {
        out.boundary_a = out.boundary_b = obs.bearings[0];
        return out;
    }
    // Largest gap between consecutive sorted angles; the sector is its
    // complement, running CCW from the bearing after the gap to the one
    // before it.
    double best_gap = 2.0 * std::numbers::pi - ang[n - 1].first + ang[0].first;
    int gap_at = n - 1;
    for (int j = 0; j + 1 < n; ++j) {
        const double gap = ang[j + 1].first - ang[j].first;
        if (gap > best_gap) {
            best_gap = gap;
            gap_at = j;
        }
    }
    out.angle = 2.0 * std::numbers::pi - best_gap;
    out.boundary_a = obs.bearings[ang[(gap_at + 1) % n].second];
    out.boundary_b = obs.bearings[ang[gap_at].second];
    return out;
}

Action analytical_action(const Observation& obs) {
    if (obs.empty()) return {};
    const SectorResult sector = smallest_enclosing_sector(obs);
    if (sector.angle >= std::numbers::pi) return {};
    const Vec2 m = sector.boundary_a + sector.boundary_b;
    const double len = norm(m);
    if (len == 0.0) return {};
    return {m / len, len / 2.0};
}

Action network_action(const PolicyNet& net, const Observation& obs) {
    if (obs.empty()) return {};
    const FrameRotation f = frame_of(obs);
    return t_post(net.forward(t_pre(obs, f)), f);
}

Action controller_action(const Controller& c, const Observation& obs) {
    if (c.kind == Controller::Kind::kAnalytical) return analytical_action(obs);
    if (c.net == nullptr)
        throw std::invalid_argument("controller_action: network controller without a network");
    return network_action(*c.net, obs);
}

SwarmState step(const SwarmState& state, const Controller& c, double visibility) {
    SwarmState next;
    next.time_step = state.time_step + 1;
    next.positions.resize(state.positions.size());
    for (int i = 0; i < state.size(); ++i) {
        const Action a = controller_action(c, observe(state, i, visibility));
        next.positions[i] = state.positions[i] + a.direction * (a.step_size * c.s_max);
    }
    return next;
}

std::pair<ScenarioResult, Trajectory> rollout(const SwarmState& initial, const Controller& c,
                                              double visibility, const RolloutOptions& opt) {
    ScenarioResult res;
    Trajectory traj;
    SwarmState s = initial;

    auto record = [&](const SwarmState& st) {
        const VisibilityGraph g = build_visibility_graph(st, visibility);
        const auto comps = connected_components(g);
        std::size_t largest = 0;
        for (const auto& block : comps) largest = std::max(largest, block.size());
        StepRecord r;
        r.max_centroid_dist = max_centroid_distance(st);
        r.n_components = static_cast<int>(comps.size());
        r.largest_fraction = static_cast<double>(largest) / st.size();
        traj.records.push_back(r);
        if (opt.record_positions) traj.positions.push_back(st.positions);
        return r;
    };
    auto note = [&](const StepRecord& r, int at) {
        if (r.n_components > 1 && !res.first_disconnection_step) {
            res.first_disconnection_step = at;
            res.stayed_connected = false;
        }
        if (!res.converged && r.n_components == 1 && r.max_centroid_dist <= opt.conv_threshold) {
            res.converged = true;
            res.convergence_step = at;
        }
    };

    note(record(s), 0);
    for (int k = 1; k <= opt.max_steps && !res.converged; ++k) {
        s = step(s, c, visibility);
        res.steps_executed = k;
        note(record(s), k);
    }
    res.largest_fraction_final = traj.records.back().largest_fraction;
    return {std::move(res), std::move(traj)};
}

}  // namespace swarmlab

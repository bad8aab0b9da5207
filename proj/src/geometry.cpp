#include "swarmlab/geometry.hpp"

#include <algorithm>
#include <cassert>

namespace swarmlab {

double distance(Vec2 a, Vec2 b) { return norm(b - a); }

VisibilityGraph build_visibility_graph(const SwarmState& state, double visibility) {
    VisibilityGraph g;
    g.n = state.size();
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            if (distance(state.positions[i], state.positions[j]) <= visibility)
                g.edges.emplace_back(i, j);
    return g;
}

Observation observe(const SwarmState& state, int agent, double visibility) {
    assert(agent >= 0 && agent < state.size());
    Observation obs;
    obs.observer_index = agent;
    const Vec2 p = state.positions[agent];
    for (int j = 0; j < state.size(); ++j) {
        if (j == agent) continue;
        const Vec2 q = state.positions[j];
        const double d = distance(p, q);
        if (d > visibility) continue;
        if (d == 0.0) {
            obs.saw_coincident = true;  // edge exists, bearing does not
            continue;
        }
        obs.bearings.push_back((q - p) / d);
    }
    return obs;
}

std::vector<std::vector<int>> connected_components(const VisibilityGraph& g) {
    std::vector<std::vector<int>> adj(g.n);
    for (auto [i, j] : g.edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::vector<std::vector<int>> blocks;
    std::vector<char> seen(g.n, 0);
    std::vector<int> stack;
    for (int s = 0; s < g.n; ++s) {
        if (seen[s]) continue;
        blocks.emplace_back();
        seen[s] = 1;
        stack.push_back(s);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            blocks.back().push_back(v);
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        std::sort(blocks.back().begin(), blocks.back().end());
    }
    return blocks;
}

bool is_cohesive(const VisibilityGraph& g) { return connected_components(g).size() == 1; }

int largest_component_size(const VisibilityGraph& g) {
    int best = 0;
    for (const auto& block : connected_components(g))
        best = std::max(best, static_cast<int>(block.size()));
    return best;
}

double canonical_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end(), [](double a, double b) {
        const double fa = std::fabs(a), fb = std::fabs(b);
        if (fa != fb) return fa < fb;
        return a < b;
    });
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

Vec2 centroid(const SwarmState& state) {
    assert(state.size() > 0);
    std::vector<double> xs, ys;
    xs.reserve(state.positions.size());
    ys.reserve(state.positions.size());
    for (const Vec2& p : state.positions) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    const double n = static_cast<double>(state.size());
    return {canonical_sum(std::move(xs)) / n, canonical_sum(std::move(ys)) / n};
}

double max_centroid_distance(const SwarmState& state) {
    const Vec2 c = centroid(state);
    double worst = 0.0;
    for (const Vec2& p : state.positions) worst = std::max(worst, distance(p, c));
    return worst;
}

}  // namespace swarmlab

#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace swarmlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

/// Positions of all agents at one instant. Indices identify agents for the
/// whole lifetime of a scenario.
struct SwarmState {
    std::vector<Vec2> positions;
    int time_step = 0;

    int size() const { return static_cast<int>(positions.size()); }
};

/// What one agent senses: unit bearings toward every visible neighbor, in
/// agent-index order. No distances, no identities. A neighbor at the exact
/// same position has no defined bearing; it is skipped and flagged.
struct Observation {
    std::vector<Vec2> bearings;
    int observer_index = -1;
    bool saw_coincident = false;

    bool empty() const { return bearings.empty(); }
    int size() const { return static_cast<int>(bearings.size()); }
};

/// Undirected visibility graph over agent indices; edges stored with i < j,
/// lexicographically sorted.
struct VisibilityGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
};

double distance(Vec2 a, Vec2 b);

/// Edge (i, j) present iff distance <= visibility (inclusive at the boundary).
VisibilityGraph build_visibility_graph(const SwarmState& state, double visibility);

Observation observe(const SwarmState& state, int agent, double visibility);

/// Components as sorted index lists, ordered by smallest member.
std::vector<std::vector<int>> connected_components(const VisibilityGraph& g);

bool is_cohesive(const VisibilityGraph& g);

int largest_component_size(const VisibilityGraph& g);

/// Sum in ascending (|v|, v) order. The result is independent of the input
/// order, and negating every input negates the sum exactly.
double canonical_sum(std::vector<double> values);

/// Mean position, accumulated with canonical_sum so the result is
/// bit-identical under any permutation of the agents.
Vec2 centroid(const SwarmState& state);

/// Largest distance from any agent to the centroid.
double max_centroid_distance(const SwarmState& state);

}  // namespace swarmlab

#include "swarmlab/frame.hpp"

#include <algorithm>
#include <cmath>

namespace swarmlab {

std::optional<Vec2> mean_direction(const Observation& obs) {
    if (obs.empty()) return std::nullopt;
    std::vector<double> xs, ys;
    xs.reserve(obs.bearings.size());
    ys.reserve(obs.bearings.size());
    for (const Vec2& b : obs.bearings) {
        xs.push_back(b.x);
        ys.push_back(b.y);
    }
    const Vec2 s{canonical_sum(std::move(xs)), canonical_sum(std::move(ys))};
    const double n = norm(s);
    if (n == 0.0) return std::nullopt;
    return Vec2{s.x / n, s.y / n};
}

FrameRotation frame_of(const Observation& obs) {
    FrameRotation f;
    const auto u = mean_direction(obs);
    if (!u) return f;  // identity
    f.degenerate = false;
    f.cos_theta = u->x;
    f.sin_theta = u->y;
    const double sign = (u->y < 0.0) ? -1.0 : 1.0;  // sign(0) := +1
    f.theta_star = sign * std::acos(std::clamp(u->x, -1.0, 1.0));
    return f;
}

Observation t_pre(const Observation& obs, const FrameRotation& f) {
    if (f.degenerate) return obs;
    Observation out;
    out.observer_index = obs.observer_index;
    out.saw_coincident = obs.saw_coincident;
    out.bearings.reserve(obs.bearings.size());
    const double c = f.cos_theta, s = f.sin_theta;
    for (const Vec2& b : obs.bearings)
        out.bearings.push_back({c * b.x + s * b.y, c * b.y - s * b.x});
    return out;
}

Action t_post(const Action& a, const FrameRotation& f) {
    if (f.degenerate) return a;
    const double c = f.cos_theta, s = f.sin_theta;
    return {{c * a.direction.x - s * a.direction.y, s * a.direction.x + c * a.direction.y},
            a.step_size};
}

}  // namespace swarmlab

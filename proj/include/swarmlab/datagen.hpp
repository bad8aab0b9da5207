#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "swarmlab/geometry.hpp"
#include "swarmlab/pcg32.hpp"

namespace swarmlab {

struct GeneratorConfig {
    int num_agents = 10;
    double visibility = 1.0;
    double visibility_ratio = 0.5;  // placement radius as a fraction of visibility
    std::uint64_t seed = 0;
    double initial_boundary = 0.0;  // square side; <= 0 picks the default
    int max_attempts = 1000;        // per agent, and also the restart budget
};

inline double effective_visibility(const GeneratorConfig& cfg) {
    return cfg.visibility * cfg.visibility_ratio;
}

/// Default placement square side: 2 * visibility * sqrt(num_agents).
double default_boundary_side(int num_agents, double visibility);

/// Incremental placement with rejection sampling. Each new agent lands
/// inside the union of the initial square and visibility disks around the
/// agents placed so far, and must fall strictly within the effective
/// visibility of at least one of them. Indices are shuffled afterwards so
/// placement order leaks nothing. Throws NumericError after exhausting the
/// restart budget; the result is always connected under the effective
/// visibility.
SwarmState generate_constellation(const GeneratorConfig& cfg);

struct DatasetItem {
    std::uint64_t seed = 0;
    SwarmState state;
};

struct Dataset {
    GeneratorConfig config;  // item i used seed config.seed + i
    std::vector<DatasetItem> items;
};

/// Item i is generated with seed cfg.seed + i, so any prefix of a dataset is
/// stable under extension.
Dataset generate_dataset(const GeneratorConfig& cfg, int count);

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);  // throws DataError

/// Named difficulty presets for generation and evaluation.
struct Profile {
    const char* name;
    double visibility_ratio;
    int num_agents;  // 0 = keep the caller's value
};

extern const std::vector<Profile> kProfiles;
const Profile* find_profile(std::string_view name);

namespace detail {
/// Placement before the final shuffle, exposed for tests.
std::vector<Vec2> place_agents(const GeneratorConfig& cfg, Pcg32& rng);
}  // namespace detail

}  // namespace swarmlab

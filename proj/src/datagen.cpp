#include "swarmlab/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "swarmlab/errors.hpp"

namespace swarmlab {

double default_boundary_side(int num_agents, double visibility) {
    return 2.0 * visibility * std::sqrt(static_cast<double>(num_agents));
}

const std::vector<Profile> kProfiles = {
    {"regular", 0.5, 0},   {"vr625", 0.625, 0}, {"challenging", 0.75, 0},
    {"vr875", 0.875, 0},   {"marginal", 1.0, 0}, {"train10", 0.5, 10},
};

const Profile* find_profile(std::string_view name) {
    for (const Profile& p : kProfiles)
        if (name == p.name) return &p;
    return nullptr;
}

namespace detail {

std::vector<Vec2> place_agents(const GeneratorConfig& cfg, Pcg32& rng) {
    if (cfg.num_agents < 1)
        throw NumericError("generate_constellation: need at least one agent");
    if (cfg.visibility <= 0.0 || cfg.visibility_ratio <= 0.0)
        throw NumericError("generate_constellation: visibility and ratio must be positive");
    if (cfg.max_attempts < 1)
        throw NumericError("generate_constellation: max_attempts must be positive");

    const double v_eff = effective_visibility(cfg);
    const double side =
        cfg.initial_boundary > 0.0 ? cfg.initial_boundary
                                   : default_boundary_side(cfg.num_agents, cfg.visibility);
    const double half = side / 2.0;

    for (int restart = 0; restart < cfg.max_attempts; ++restart) {
        std::vector<Vec2> placed;
        placed.push_back({rng.uniform(-half, half), rng.uniform(-half, half)});

        // Sampling region: initial square plus a visibility disk around every
        // placed agent. Draws come from the region's bounding box; points
        // outside the region are redrawn and do not count as attempts.
        double lo_x = -half, hi_x = half, lo_y = -half, hi_y = half;
        auto grow = [&](Vec2 p) {
            lo_x = std::min(lo_x, p.x - cfg.visibility);
            hi_x = std::max(hi_x, p.x + cfg.visibility);
            lo_y = std::min(lo_y, p.y - cfg.visibility);
            hi_y = std::max(hi_y, p.y + cfg.visibility);
        };
        grow(placed[0]);

        bool ok = true;
        for (int k = 1; k < cfg.num_agents && ok; ++k) {
            bool accepted = false;
            for (int attempt = 0; attempt < cfg.max_attempts && !accepted; ++attempt) {
                Vec2 p;
                int guard = 0;
                for (;;) {
                    p = {rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
                    bool inside = std::fabs(p.x) <= half && std::fabs(p.y) <= half;
                    for (std::size_t q = 0; !inside && q < placed.size(); ++q)
                        inside = distance(p, placed[q]) <= cfg.visibility;
                    if (inside) break;
                    if (++guard >= 100000)
                        throw NumericError("generate_constellation: sampling region collapsed");
                }
                for (std::size_t q = 0; q < placed.size() && !accepted; ++q)
                    accepted = distance(p, placed[q]) < v_eff;
                if (accepted) {
                    placed.push_back(p);
                    grow(p);
                }
            }
            ok = accepted;
        }
        if (ok) return placed;
    }
    throw NumericError("Failed to create constellation");
}

}  // namespace detail

SwarmState generate_constellation(const GeneratorConfig& cfg) {
    Pcg32 rng(cfg.seed, Pcg32::kStreamDatagen);
    SwarmState st;
    st.positions = detail::place_agents(cfg, rng);
    shuffle(st.positions, rng);
    return st;
}

Dataset generate_dataset(const GeneratorConfig& cfg, int count) {
    Dataset ds;
    ds.config = cfg;
    ds.items.reserve(count);
    for (int i = 0; i < count; ++i) {
        GeneratorConfig item_cfg = cfg;
        item_cfg.seed = cfg.seed + static_cast<std::uint64_t>(i);
        try {
            ds.items.push_back({item_cfg.seed, generate_constellation(item_cfg)});
        } catch (const NumericError& e) {
            throw NumericError("dataset item " + std::to_string(i) + ": " + e.what());
        }
    }
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    const nlohmann::json header{{"format", "swarmlab-dataset"},
                                {"version", 1},
                                {"num_agents", ds.config.num_agents},
                                {"visibility", ds.config.visibility},
                                {"visibility_ratio", ds.config.visibility_ratio},
                                {"seed", ds.config.seed},
                                {"initial_boundary", ds.config.initial_boundary},
                                {"max_attempts", ds.config.max_attempts},
                                {"count", ds.items.size()}};
    f << header.dump() << '\n';
    for (const DatasetItem& it : ds.items) {
        nlohmann::json pos = nlohmann::json::array();
        for (const Vec2& p : it.state.positions) pos.push_back({p.x, p.y});
        f << nlohmann::json{{"seed", it.seed}, {"positions", std::move(pos)}}.dump() << '\n';
    }
    if (!f) throw DataError("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw DataError(path + ": empty file");
    try {
        const nlohmann::json header = nlohmann::json::parse(line);
        if (header.at("format").get<std::string>() != "swarmlab-dataset")
            throw DataError(path + ": not a dataset file");
        if (header.at("version").get<int>() != 1)
            throw DataError(path + ": unsupported version");
        Dataset ds;
        ds.config.num_agents = header.at("num_agents").get<int>();
        ds.config.visibility = header.at("visibility").get<double>();
        ds.config.visibility_ratio = header.at("visibility_ratio").get<double>();
        ds.config.seed = header.at("seed").get<std::uint64_t>();
        ds.config.initial_boundary = header.at("initial_boundary").get<double>();
        ds.config.max_attempts = header.at("max_attempts").get<int>();
        const auto count = header.at("count").get<std::size_t>();
        const double v_eff = effective_visibility(ds.config);

        while (std::getline(f, line)) {
            if (line.empty()) continue;
            const nlohmann::json j = nlohmann::json::parse(line);
            DatasetItem it;
            it.seed = j.at("seed").get<std::uint64_t>();
            for (const auto& p : j.at("positions")) {
                if (!p.is_array() || p.size() != 2)
                    throw DataError(path + ": malformed position");
                const double x = p[0].get<double>(), y = p[1].get<double>();
                if (!std::isfinite(x) || !std::isfinite(y))
                    throw DataError(path + ": non-finite position");
                it.state.positions.push_back({x, y});
            }
            const auto idx = std::to_string(ds.items.size());
            if (it.state.size() != ds.config.num_agents)
                throw DataError(path + ": item " + idx + " agent count mismatch");
            if (!is_cohesive(build_visibility_graph(it.state, v_eff)))
                throw DataError(path + ": item " + idx + " not connected at effective visibility");
            ds.items.push_back(std::move(it));
        }
        if (ds.items.size() != count) throw DataError(path + ": item count mismatch");
        return ds;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace swarmlab

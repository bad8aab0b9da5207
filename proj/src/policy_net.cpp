#include "swarmlab/policy_net.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "swarmlab/errors.hpp"
#include "swarmlab/pcg32.hpp"

namespace swarmlab {

const char* aggregation_name(Aggregation a) { return a == Aggregation::kMax ? "max" : "mean"; }

Aggregation aggregation_from_name(const std::string& name) {
    if (name == "max") return Aggregation::kMax;
    if (name == "mean") return Aggregation::kMean;
    throw DataError("unknown aggregation '" + name + "'");
}

const std::array<LayerLayout, kPolicyLayers.size()>& policy_layout() {
    static const auto table = [] {
        std::array<LayerLayout, kPolicyLayers.size()> t{};
        int off = 0;
        for (std::size_t l = 0; l < kPolicyLayers.size(); ++l) {
            t[l].in = kPolicyLayers[l].in;
            t[l].out = kPolicyLayers[l].out;
            t[l].w_off = off;
            off += t[l].in * t[l].out;
            t[l].b_off = off;
            off += t[l].out;
        }
        return t;
    }();
    return table;
}

namespace {

enum LayerIdx { kEnc1, kEnc2, kEnc3, kTrunk1, kTrunk2, kDir, kStep1, kStep2 };

void affine(const std::vector<double>& params, const LayerLayout& L, const double* x, double* y) {
    for (int o = 0; o < L.out; ++o) {
        double acc = params[L.b_off + o];
        const double* w = &params[L.w_off + o * L.in];
        for (int i = 0; i < L.in; ++i) acc += w[i] * x[i];
        y[o] = acc;
    }
}

// Accumulates parameter gradients and (optionally) dL/dx, given dL/dy on the
// pre-activation side.
void affine_backward(const std::vector<double>& params, const LayerLayout& L, const double* x,
                     const double* dy, double* gparams, double* dx) {
    for (int o = 0; o < L.out; ++o) {
        const double g = dy[o];
        if (g == 0.0) continue;
        gparams[L.b_off + o] += g;
        const double* w = &params[L.w_off + o * L.in];
        double* gw = &gparams[L.w_off + o * L.in];
        for (int i = 0; i < L.in; ++i) {
            gw[i] += g * x[i];
            if (dx) dx[i] += g * w[i];
        }
    }
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Action forward_impl(const std::vector<double>& params, Aggregation agg, const Observation& obs,
                    GradientTape& tape) {
    if (obs.empty()) throw std::invalid_argument("PolicyNet::forward: empty observation");
    const auto& L = policy_layout();
    const int n = obs.size();
    tape.n = n;
    tape.inputs = obs.bearings;
    tape.enc1.assign(static_cast<std::size_t>(n) * 16, 0.0);
    tape.enc2.assign(static_cast<std::size_t>(n) * 32, 0.0);
    tape.enc3.assign(static_cast<std::size_t>(n) * 16, 0.0);
    for (int j = 0; j < n; ++j) {
        const double x[2] = {obs.bearings[j].x, obs.bearings[j].y};
        double* e1 = &tape.enc1[static_cast<std::size_t>(j) * 16];
        affine(params, L[kEnc1], x, e1);
        for (int k = 0; k < 16; ++k) e1[k] = std::tanh(e1[k]);
        double* e2 = &tape.enc2[static_cast<std::size_t>(j) * 32];
        affine(params, L[kEnc2], e1, e2);
        for (int k = 0; k < 32; ++k) e2[k] = std::tanh(e2[k]);
        double* e3 = &tape.enc3[static_cast<std::size_t>(j) * 16];
        affine(params, L[kEnc3], e2, e3);
        for (int k = 0; k < 16; ++k) e3[k] = std::tanh(e3[k]);
    }

    tape.pooled.assign(16, 0.0);
    tape.argmax.assign(16, 0);
    if (agg == Aggregation::kMax) {
        // Strictly-greater scan: ties resolve to the lowest bearing index.
        for (int k = 0; k < 16; ++k) {
            double best = tape.enc3[k];
            int arg = 0;
            for (int j = 1; j < n; ++j) {
                const double v = tape.enc3[static_cast<std::size_t>(j) * 16 + k];
                if (v > best) {
                    best = v;
                    arg = j;
                }
            }
            tape.pooled[k] = best;
            tape.argmax[k] = arg;
        }
    } else {
        std::vector<double> column(n);
        for (int k = 0; k < 16; ++k) {
            for (int j = 0; j < n; ++j) column[j] = tape.enc3[static_cast<std::size_t>(j) * 16 + k];
            tape.pooled[k] = canonical_sum(column) / n;
        }
    }

    tape.trunk1.assign(32, 0.0);
    affine(params, L[kTrunk1], tape.pooled.data(), tape.trunk1.data());
    for (double& v : tape.trunk1) v = std::tanh(v);
    tape.trunk2.assign(32, 0.0);
    affine(params, L[kTrunk2], tape.trunk1.data(), tape.trunk2.data());
    for (double& v : tape.trunk2) v = std::tanh(v);

    double dir[2];
    affine(params, L[kDir], tape.trunk2.data(), dir);
    tape.dir_raw = {std::tanh(dir[0]), std::tanh(dir[1])};
    tape.dir_norm = norm(tape.dir_raw);
    tape.dir_fallback = tape.dir_norm < kDirectionFallbackNorm;

    tape.step1.assign(32, 0.0);
    affine(params, L[kStep1], tape.trunk2.data(), tape.step1.data());
    for (double& v : tape.step1) v = v > 0.0 ? v : 0.0;
    double z;
    affine(params, L[kStep2], tape.step1.data(), &z);
    tape.sigma = sigmoid(z);

    if (tape.dir_fallback) return {{1.0, 0.0}, 0.0};
    return {tape.dir_raw / tape.dir_norm, tape.sigma};
}

}  // namespace

PolicyNet PolicyNet::init(std::uint64_t seed, Aggregation agg) {
    PolicyNet net;
    net.agg_ = agg;
    net.params_.assign(kPolicyParamCount, 0.0);
    // Glorot-uniform weights drawn in layer order, row-major; biases start at
    // zero (no draws), so the stream position is independent of bias counts.
    Pcg32 rng(seed, Pcg32::kStreamInit);
    const auto& L = policy_layout();
    for (const LayerLayout& l : L) {
        const double r = std::sqrt(6.0 / (l.in + l.out));
        for (int k = 0; k < l.in * l.out; ++k) net.params_[l.w_off + k] = rng.uniform(-r, r);
    }
    return net;
}

Action PolicyNet::forward(const Observation& canonical_obs) const {
    GradientTape tape;
    return forward_impl(params_, agg_, canonical_obs, tape);
}

Action PolicyNet::forward(const Observation& canonical_obs, GradientTape& tape) const {
    return forward_impl(params_, agg_, canonical_obs, tape);
}

PolicyNet::Gradients PolicyNet::backward(const GradientTape& tape, const ActionGrad& up) const {
    const auto& L = policy_layout();
    const int n = tape.n;
    if (n <= 0 || tape.inputs.size() != static_cast<std::size_t>(n) ||
        tape.enc1.size() != static_cast<std::size_t>(n) * 16 ||
        tape.enc2.size() != static_cast<std::size_t>(n) * 32 ||
        tape.enc3.size() != static_cast<std::size_t>(n) * 16 || tape.pooled.size() != 16 ||
        tape.trunk1.size() != 32 || tape.trunk2.size() != 32 || tape.step1.size() != 32)
        throw std::invalid_argument("PolicyNet::backward: tape does not match this network");

    Gradients g;
    g.params.assign(params_.size(), 0.0);
    g.bearings.assign(n, {0.0, 0.0});
    if (tape.dir_fallback) return g;  // fallback action is constant

    double d_trunk2[32] = {0};

    {
        // direction head: a = raw/|raw|, da/draw = (I - a a^T)/|raw|
        const Vec2 a = tape.dir_raw / tape.dir_norm;
        const double adot = a.x * up.direction.x + a.y * up.direction.y;
        const Vec2 draw{(up.direction.x - a.x * adot) / tape.dir_norm,
                        (up.direction.y - a.y * adot) / tape.dir_norm};
        const double dpre[2] = {draw.x * (1.0 - tape.dir_raw.x * tape.dir_raw.x),
                                draw.y * (1.0 - tape.dir_raw.y * tape.dir_raw.y)};
        affine_backward(params_, L[kDir], tape.trunk2.data(), dpre, g.params.data(), d_trunk2);
    }
    {
        const double dz = up.step_size * tape.sigma * (1.0 - tape.sigma);
        double d_step1[32] = {0};
        affine_backward(params_, L[kStep2], tape.step1.data(), &dz, g.params.data(), d_step1);
        double dpre[32];
        for (int k = 0; k < 32; ++k) dpre[k] = tape.step1[k] > 0.0 ? d_step1[k] : 0.0;
        affine_backward(params_, L[kStep1], tape.trunk2.data(), dpre, g.params.data(), d_trunk2);
    }

    double dpre2[32];
    for (int k = 0; k < 32; ++k) dpre2[k] = d_trunk2[k] * (1.0 - tape.trunk2[k] * tape.trunk2[k]);
    double d_trunk1[32] = {0};
    affine_backward(params_, L[kTrunk2], tape.trunk1.data(), dpre2, g.params.data(), d_trunk1);
    double dpre1[32];
    for (int k = 0; k < 32; ++k) dpre1[k] = d_trunk1[k] * (1.0 - tape.trunk1[k] * tape.trunk1[k]);
    double d_pooled[16] = {0};
    affine_backward(params_, L[kTrunk1], tape.pooled.data(), dpre1, g.params.data(), d_pooled);

    std::vector<double> d_enc3(static_cast<std::size_t>(n) * 16, 0.0);
    if (agg_ == Aggregation::kMax) {
        for (int k = 0; k < 16; ++k)
            d_enc3[static_cast<std::size_t>(tape.argmax[k]) * 16 + k] += d_pooled[k];
    } else {
        for (int k = 0; k < 16; ++k) {
            const double share = d_pooled[k] / n;
            for (int j = 0; j < n; ++j) d_enc3[static_cast<std::size_t>(j) * 16 + k] += share;
        }
    }

    for (int j = 0; j < n; ++j) {
        double d3pre[16];
        bool live = false;
        for (int k = 0; k < 16; ++k) {
            const double e = tape.enc3[static_cast<std::size_t>(j) * 16 + k];
            d3pre[k] = d_enc3[static_cast<std::size_t>(j) * 16 + k] * (1.0 - e * e);
            live = live || d3pre[k] != 0.0;
        }
        if (!live) continue;  // with max pooling most bearings carry nothing
        double d2[32] = {0};
        affine_backward(params_, L[kEnc3], &tape.enc2[static_cast<std::size_t>(j) * 32], d3pre,
                        g.params.data(), d2);
        double d2pre[32];
        for (int k = 0; k < 32; ++k) {
            const double e = tape.enc2[static_cast<std::size_t>(j) * 32 + k];
            d2pre[k] = d2[k] * (1.0 - e * e);
        }
        double d1[16] = {0};
        affine_backward(params_, L[kEnc2], &tape.enc1[static_cast<std::size_t>(j) * 16], d2pre,
                        g.params.data(), d1);
        double d1pre[16];
        for (int k = 0; k < 16; ++k) {
            const double e = tape.enc1[static_cast<std::size_t>(j) * 16 + k];
            d1pre[k] = d1[k] * (1.0 - e * e);
        }
        const double x[2] = {tape.inputs[j].x, tape.inputs[j].y};
        double dx[2] = {0.0, 0.0};
        affine_backward(params_, L[kEnc1], x, d1pre, g.params.data(), dx);
        g.bearings[j] = {dx[0], dx[1]};
    }
    return g;
}

void PolicyNet::save(const std::string& path) const {
    const auto& L = policy_layout();
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < L.size(); ++l) {
        nlohmann::json weights = nlohmann::json::array();
        nlohmann::json bias = nlohmann::json::array();
        for (int k = 0; k < L[l].in * L[l].out; ++k) weights.push_back(params_[L[l].w_off + k]);
        for (int k = 0; k < L[l].out; ++k) bias.push_back(params_[L[l].b_off + k]);
        layers.push_back({{"name", kPolicyLayers[l].name},
                          {"in", L[l].in},
                          {"out", L[l].out},
                          {"weights", std::move(weights)},
                          {"bias", std::move(bias)}});
    }
    const nlohmann::json doc{{"format", "swarmlab-policy"},
                             {"version", 1},
                             {"aggregation", aggregation_name(agg_)},
                             {"layers", std::move(layers)}};
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    f << doc.dump(2) << '\n';
    if (!f) throw DataError("write failed: " + path);
}

PolicyNet PolicyNet::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path);
    nlohmann::json doc;
    try {
        f >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "swarmlab-policy")
            throw DataError(path + ": not a policy file");
        if (doc.at("version").get<int>() != 1)
            throw DataError(path + ": unsupported version");
        PolicyNet net;
        net.agg_ = aggregation_from_name(doc.at("aggregation").get<std::string>());
        net.params_.assign(kPolicyParamCount, 0.0);
        const auto& layers = doc.at("layers");
        const auto& L = policy_layout();
        if (!layers.is_array() || layers.size() != L.size())
            throw DataError(path + ": wrong layer count");
        for (std::size_t l = 0; l < L.size(); ++l) {
            const auto& jl = layers[l];
            if (jl.at("name").get<std::string>() != kPolicyLayers[l].name ||
                jl.at("in").get<int>() != L[l].in || jl.at("out").get<int>() != L[l].out)
                throw DataError(path + ": layer " + std::to_string(l) + " shape mismatch");
            const auto& w = jl.at("weights");
            const auto& b = jl.at("bias");
            if (static_cast<int>(w.size()) != L[l].in * L[l].out ||
                static_cast<int>(b.size()) != L[l].out)
                throw DataError(path + ": layer " + std::to_string(l) + " parameter count mismatch");
            for (int k = 0; k < L[l].in * L[l].out; ++k) {
                const double v = w[k].get<double>();
                if (!std::isfinite(v)) throw DataError(path + ": non-finite parameter");
                net.params_[L[l].w_off + k] = v;
            }
            for (int k = 0; k < L[l].out; ++k) {
                const double v = b[k].get<double>();
                if (!std::isfinite(v)) throw DataError(path + ": non-finite parameter");
                net.params_[L[l].b_off + k] = v;
            }
        }
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace swarmlab

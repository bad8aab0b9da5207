#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "swarmlab/frame.hpp"
#include "swarmlab/geometry.hpp"

namespace swarmlab {

enum class Aggregation { kMax, kMean };

const char* aggregation_name(Aggregation a);
Aggregation aggregation_from_name(const std::string& name);  // throws DataError

struct LayerShape {
    const char* name;
    int in;
    int out;
};

/// Layer table in data-flow order. The shared encoder runs per bearing, the
/// pooled feature vector feeds the trunk, and two heads branch off the trunk:
/// a direction head (tanh + normalize) and a step-size branch
/// (rectifier 32->32, then logistic 32->1).
inline constexpr std::array<LayerShape, 8> kPolicyLayers{{
    {"enc1", 2, 16},
    {"enc2", 16, 32},
    {"enc3", 32, 16},
    {"trunk1", 16, 32},
    {"trunk2", 32, 32},
    {"dir", 32, 2},
    {"step1", 32, 32},
    {"step2", 32, 1},
}};

inline constexpr int kPolicyParamCount = 3875;

/// If the raw direction head output has norm below this, the action falls
/// back to direction (1, 0) with step size 0.
inline constexpr double kDirectionFallbackNorm = 1e-8;

/// Intermediate activations from one forward pass, everything backward()
/// needs. Layout: per-bearing rows are contiguous (row j holds bearing j).
struct GradientTape {
    int n = 0;
    std::vector<Vec2> inputs;
    std::vector<double> enc1, enc2, enc3;  // post-activation, n x width
    std::vector<int> argmax;               // max variant: winning bearing per feature
    std::vector<double> pooled;             // 16
    std::vector<double> trunk1, trunk2;     // 32 each, post-tanh
    Vec2 dir_raw;                           // post-tanh direction head output
    double dir_norm = 0.0;
    bool dir_fallback = false;
    std::vector<double> step1;              // 32, post-rectifier
    double sigma = 0.0;
};

/// Gradient of a scalar with respect to an Action.
struct ActionGrad {
    Vec2 direction{0.0, 0.0};
    double step_size = 0.0;
};

/// Permutation-invariant policy over canonical observations. Parameters live
/// in one flat vector (weights row-major, then bias, per layer in table
/// order); total count is always kPolicyParamCount.
class PolicyNet {
public:
    /// Glorot-uniform initialization, reproducible from the seed.
    static PolicyNet init(std::uint64_t seed, Aggregation agg);

    int param_count() const { return static_cast<int>(params_.size()); }
    Aggregation aggregation() const { return agg_; }

    /// Evaluate on an observation already rotated into its canonical frame.
    /// Requires at least one bearing.
    Action forward(const Observation& canonical_obs) const;
    Action forward(const Observation& canonical_obs, GradientTape& tape) const;

    struct Gradients {
        std::vector<double> params;    // same layout as parameters()
        std::vector<Vec2> bearings;    // one per input bearing
    };
    /// Reverse-mode gradients for one taped pass. The fallback action is
    /// constant, so its tape yields all-zero gradients.
    Gradients backward(const GradientTape& tape, const ActionGrad& upstream) const;

    const std::vector<double>& parameters() const { return params_; }
    std::vector<double>& mutable_parameters() { return params_; }

    void save(const std::string& path) const;
    static PolicyNet load(const std::string& path);  // throws DataError

private:
    PolicyNet() = default;

    Aggregation agg_ = Aggregation::kMax;
    std::vector<double> params_;
};

/// Flat-vector offsets for one layer: weights at [w_off, w_off + in*out),
/// bias at [b_off, b_off + out).
struct LayerLayout {
    int w_off = 0;
    int b_off = 0;
    int in = 0;
    int out = 0;
};

const std::array<LayerLayout, kPolicyLayers.size()>& policy_layout();

}  // namespace swarmlab

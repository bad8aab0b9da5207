#include "swarmlab/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <stdexcept>

#include "swarmlab/errors.hpp"
#include "swarmlab/frame.hpp"
#include "swarmlab/loss.hpp"

namespace swarmlab {

const char* const kTrainLogHeader = "stage,epoch,env,loss,lambda2,task";

const std::vector<CurriculumStage>& builtin_curriculum() {
    static const std::vector<CurriculumStage> table = {
        {1, 'A', 0.30, 5, 200, 120, 5e-5},  {2, 'A', 0.40, 5, 200, 120, 5e-5},
        {3, 'A', 0.50, 10, 200, 120, 5e-5}, {4, 'A', 0.60, 25, 200, 120, 5e-5},
        {5, 'B', 0.65, 10, 200, 120, 5e-6}, {6, 'B', 0.70, 35, 200, 120, 5e-6},
        {7, 'B', 0.75, 35, 200, 120, 5e-6}, {8, 'B', 0.80, 35, 200, 120, 5e-6},
        {9, 'C', 0.75, 35, 500, 180, 5e-6}, {10, 'C', 0.80, 35, 500, 180, 5e-6},
        {11, 'C', 0.85, 35, 500, 180, 5e-6}, {12, 'C', 0.90, 35, 500, 180, 5e-6},
        {13, 'C', 0.95, 35, 500, 180, 5e-6}, {14, 'C', 1.00, 35, 500, 180, 5e-6},
    };
    return table;
}

void adam_update(std::vector<double>& params, const std::vector<double>& grads, AdamState& opt,
                 double learning_rate) {
    if (params.size() != grads.size() || params.size() != opt.m.size())
        throw std::invalid_argument("adam_update: size mismatch");
    opt.step += 1;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * grads[i];
        opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * grads[i] * grads[i];
        params[i] -= learning_rate * (opt.m[i] / bc1) / (std::sqrt(opt.v[i] / bc2) + opt.epsilon);
    }
}

TrainStepResult train_step(const PolicyNet& net, const SwarmState& state, double visibility,
                           double alpha, double beta, double s_max) {
    const int n = state.size();
    TrainStepResult out;
    out.param_grads.assign(net.parameters().size(), 0.0);

    struct AgentPass {
        bool active = false;
        GradientTape tape;
        FrameRotation frame;
        Action world;
    };
    std::vector<AgentPass> passes(n);

    SwarmState next;
    next.time_step = state.time_step + 1;
    next.positions.resize(n);
    for (int i = 0; i < n; ++i) {
        const Observation obs = observe(state, i, visibility);
        AgentPass& ap = passes[i];
        if (!obs.empty()) {
            ap.frame = frame_of(obs);
            ap.world = t_post(net.forward(t_pre(obs, ap.frame), ap.tape), ap.frame);
            ap.active = true;
        }
        next.positions[i] =
            state.positions[i] + ap.world.direction * (ap.world.step_size * s_max);
    }

    const TotalLoss L = total_loss(next, visibility, alpha, beta);
    out.loss = L.total.value;
    out.lambda2 = L.lambda2;
    out.task_value = L.task_value;

    for (int i = 0; i < n; ++i) {
        const AgentPass& ap = passes[i];
        if (!ap.active) continue;
        const Vec2 gp = L.total.grad[i];  // dL/dp_i'
        ActionGrad up;
        up.step_size = s_max * dot(ap.world.direction, gp);
        const Vec2 gw = gp * (ap.world.step_size * s_max);
        if (ap.frame.degenerate) {
            up.direction = gw;
        } else {
            // t_post applied R(theta*); its transpose pulls gradients back
            const double c = ap.frame.cos_theta, s = ap.frame.sin_theta;
            up.direction = {c * gw.x + s * gw.y, c * gw.y - s * gw.x};
        }
        const PolicyNet::Gradients g = net.backward(ap.tape, up);
        for (std::size_t k = 0; k < g.params.size(); ++k) out.param_grads[k] += g.params[k];
    }
    out.next_state = std::move(next);
    return out;
}

void train_stage(PolicyNet& net, const CurriculumStage& stage, const Dataset& data,
                 AdamState& opt, const TrainOptions& opt_train) {
    if (std::fabs(data.config.visibility_ratio - stage.visibility_ratio) > 1e-12)
        throw DataError("train_stage: dataset visibility ratio does not match the stage");
    if (static_cast<int>(data.items.size()) < stage.environments)
        throw DataError("train_stage: dataset smaller than the stage environment count");
    if (net.parameters().size() != opt.m.size())
        throw std::invalid_argument("train_stage: optimizer state size mismatch");

    Pcg32 order_rng(opt_train.seed + static_cast<std::uint64_t>(stage.stage_id),
                    Pcg32::kStreamShuffle);
    std::vector<int> order(stage.environments);
    std::vector<double> grad_acc(net.parameters().size());

    for (int epoch = 0; epoch < stage.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        shuffle(order, order_rng);
        for (int env : order) {
            SwarmState s = data.items[env].state;
            std::fill(grad_acc.begin(), grad_acc.end(), 0.0);
            double loss_sum = 0.0, l2_sum = 0.0, task_sum = 0.0;
            for (int k = 0; k < stage.steps; ++k) {
                TrainStepResult r = train_step(net, s, opt_train.visibility, opt_train.alpha,
                                               opt_train.beta, opt_train.s_max);
                for (std::size_t i = 0; i < grad_acc.size(); ++i) grad_acc[i] += r.param_grads[i];
                loss_sum += r.loss;
                l2_sum += r.lambda2;
                task_sum += r.task_value;
                s = std::move(r.next_state);
            }
            const double inv = 1.0 / stage.steps;
            for (double& g : grad_acc) g *= inv;
            adam_update(net.mutable_parameters(), grad_acc, opt, stage.learning_rate);
            if (opt_train.log)
                *opt_train.log << stage.stage_id << ',' << epoch << ',' << env << ','
                               << loss_sum * inv << ',' << l2_sum * inv << ',' << task_sum * inv
                               << '\n';
        }
    }
}

PolicyNet run_curriculum(PolicyNet net, const std::vector<CurriculumStage>& stages,
                         const GeneratorConfig& base_cfg, const TrainOptions& opt_train) {
    AdamState opt(net.parameters().size());
    if (opt_train.log) *opt_train.log << kTrainLogHeader << '\n';
    for (const CurriculumStage& stage : stages) {
        GeneratorConfig cfg = base_cfg;
        cfg.visibility = opt_train.visibility;
        cfg.visibility_ratio = stage.visibility_ratio;
        cfg.seed = opt_train.seed + 1000ULL * static_cast<std::uint64_t>(stage.stage_id);
        const Dataset data = generate_dataset(cfg, stage.environments);
        train_stage(net, stage, data, opt, opt_train);
        if (!opt_train.checkpoint_dir.empty()) {
            std::filesystem::create_directories(opt_train.checkpoint_dir);
            char name[32];
            std::snprintf(name, sizeof name, "stage_%02d.json", stage.stage_id);
            net.save(opt_train.checkpoint_dir + "/" + name);
        }
    }
    return net;
}

}  // namespace swarmlab

// Acceptance harness: one criterion per invocation, one PASS/FAIL line on
// stdout, exit 0/1. Criteria 9 and 10 are the long-running ones; 10 reuses
// the checkpoints 9 leaves in the artifact directory.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "swarmlab/datagen.hpp"
#include "swarmlab/errors.hpp"
#include "swarmlab/eval.hpp"
#include "swarmlab/loss.hpp"
#include "swarmlab/simulator.hpp"
#include "swarmlab/training.hpp"
#include "test_util.hpp"

namespace {

using namespace swarmlab;
using namespace testutil;

std::string fmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

int eval_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

EvalParams default_params() {
    EvalParams p;
    p.visibility = 1.0;
    p.max_steps = kDefaultMaxSteps;
    p.conv_threshold = kDefaultConvFactor;
    p.jobs = eval_jobs();
    return p;
}

Observation rotate_obs(const Observation& obs, double th) {
    Observation out = obs;
    for (Vec2& b : out.bearings) b = rotate(b, th);
    return out;
}

Observation rot90_obs(const Observation& obs, int k) {
    Observation out = obs;
    for (Vec2& b : out.bearings) b = rot90(b, k);
    return out;
}

// True when an h-sized parameter probe cannot flip a program branch: the
// direction head is far from its fallback switch, every rectifier
// preactivation is away from zero, and (max variant) each pooled feature has
// a clear winner.
bool taped_pass_is_fd_safe(const PolicyNet& net, const GradientTape& tape, double margin) {
    if (tape.dir_fallback || tape.dir_norm < 1e-6) return false;
    const auto& L = policy_layout();
    const auto& p = net.parameters();
    for (int o = 0; o < L[6].out; ++o) {
        double acc = p[L[6].b_off + o];
        for (int k = 0; k < L[6].in; ++k) acc += p[L[6].w_off + o * L[6].in + k] * tape.trunk2[k];
        if (std::fabs(acc) < margin) return false;
    }
    if (net.aggregation() == Aggregation::kMax) {
        for (int f = 0; f < 16; ++f) {
            const double win = tape.pooled[f];
            for (int j = 0; j < tape.n; ++j) {
                const double v = tape.enc3[j * 16 + f];
                if (v < win && win - v < margin) return false;
            }
        }
    }
    return true;
}

// ---- 1: parameter count ---------------------------------------------------

Outcome criterion_1(const std::string&) {
    const PolicyNet net = PolicyNet::init(1, Aggregation::kMax);
    int from_table = 0;
    for (const LayerShape& l : kPolicyLayers) from_table += (l.in + 1) * l.out;
    const bool ok = net.param_count() == 3875 && from_table == 3875 && kPolicyParamCount == 3875;
    return {ok, fmt("parameter count %d (required: exactly 3875; layer table sums to %d)",
                    net.param_count(), from_table)};
}

// ---- 2: rotation equivariance ----------------------------------------------

Outcome criterion_2(const std::string&) {
    Pcg32 rng(20240201, 1);
    double max_dir_err = 0.0, max_sigma_err = 0.0;
    int exact_sigma = 0, exact_dir = 0;
    const int cases = 1000;
    for (int i = 0; i < cases; ++i) {
        const PolicyNet net =
            PolicyNet::init(5000 + i, i % 2 == 0 ? Aggregation::kMax : Aggregation::kMean);
        const Observation obs = random_clear_observation(rng, 1, 12);
        const Action base = network_action(net, obs);

        // arbitrary rotation: direction equivariant, step size preserved
        const double th = rng.uniform(-std::numbers::pi, std::numbers::pi);
        const Action rot = network_action(net, rotate_obs(obs, th));
        max_dir_err = std::max(max_dir_err, norm(rot.direction - rotate(base.direction, th)));
        max_sigma_err = std::max(max_sigma_err, std::fabs(rot.step_size - base.step_size));

        // quarter-turn rotations stay inside the exactly-representable
        // family: both outputs must be bit-equal
        const int k = static_cast<int>(rng.next_below(4));
        const Action q = network_action(net, rot90_obs(obs, k));
        const Vec2 expect = rot90(base.direction, k);
        if (bit_equal(q.step_size, base.step_size)) ++exact_sigma;
        if (bit_equal(q.direction.x, expect.x) && bit_equal(q.direction.y, expect.y)) ++exact_dir;
    }
    const bool ok = max_dir_err < 1e-9 && max_sigma_err <= 1e-11 && exact_sigma == cases &&
                    exact_dir == cases;
    return {ok, fmt("%d obs: arbitrary rotations max dir err %.2e (tol 1e-9), max sigma err %.2e "
                    "(tol 1e-11); quarter-turn rotations bit-equal %d/%d sigma, %d/%d dir",
                    cases, max_dir_err, max_sigma_err, exact_sigma, cases, exact_dir, cases)};
}

// ---- 3: permutation invariance ---------------------------------------------

Outcome criterion_3(const std::string&) {
    Pcg32 rng(20240301, 1);
    const int cases = 1000;
    int exact = 0;
    for (int i = 0; i < cases; ++i) {
        const PolicyNet net =
            PolicyNet::init(6000 + i, i % 2 == 0 ? Aggregation::kMax : Aggregation::kMean);
        const Observation obs = random_observation(rng, 1, 12);
        Observation perm = obs;
        shuffle(perm.bearings, rng);
        const Action a = network_action(net, obs);
        const Action b = network_action(net, perm);
        if (bit_equal(a.direction.x, b.direction.x) && bit_equal(a.direction.y, b.direction.y) &&
            bit_equal(a.step_size, b.step_size))
            ++exact;
    }
    return {exact == cases,
            fmt("%d/%d random permutations give bit-identical actions (required: all)", exact,
                cases)};
}

// ---- 4: gradient oracles ---------------------------------------------------

Outcome criterion_4(const std::string&) {
    Pcg32 rng(20240401, 1);

    // (a) network backward vs central differences, h = 1e-5, rel err < 1e-4
    double worst_a = 0.0;
    for (int done = 0; done < 100;) {
        const PolicyNet net =
            PolicyNet::init(7000 + done * 17 + static_cast<int>(rng.next_below(13)),
                            done % 2 == 0 ? Aggregation::kMax : Aggregation::kMean);
        const Observation obs = random_clear_observation(rng, 2, 10);
        GradientTape tape;
        net.forward(obs, tape);
        if (!taped_pass_is_fd_safe(net, tape, 1e-4)) continue;
        ++done;
        ActionGrad g;
        g.direction = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        g.step_size = rng.uniform(-1, 1);
        const std::vector<double> analytic = net.backward(tape, g).params;

        PolicyNet probe = net;
        auto& params = probe.mutable_parameters();
        std::vector<double> fd(params.size());
        const double h = 1e-5;
        for (std::size_t k = 0; k < params.size(); ++k) {
            fd[k] = central_diff(
                [&](double x) {
                    const double keep = params[k];
                    params[k] = x;
                    const Action a = probe.forward(obs);
                    params[k] = keep;
                    return dot(g.direction, a.direction) + g.step_size * a.step_size;
                },
                params[k], h);
        }
        worst_a = std::max(worst_a, rel_vec_err(analytic, fd));
    }

    // (b) lambda2 position gradient vs central differences, h = 1e-6,
    // rel err < 1e-5, connected 5-8 agent states with a simple lambda2
    double worst_b = 0.0;
    std::uint64_t seed = 40000;
    for (int done = 0; done < 100;) {
        const int n = 5 + done % 4;
        const SwarmState st = random_connected_state(seed++, n, 0.55);
        if (!fd_safe_state(st, 1.0, 1e-3)) continue;
        ++done;
        const std::vector<Vec2> analytic = lambda2_position_grad(st, 1.0);
        std::vector<double> flat_an, flat_fd;
        const double h = 1e-6;
        for (int i = 0; i < n; ++i) {
            flat_an.push_back(analytic[i].x);
            flat_an.push_back(analytic[i].y);
            for (int axis = 0; axis < 2; ++axis) {
                SwarmState probe = st;
                double* coord = axis == 0 ? &probe.positions[i].x : &probe.positions[i].y;
                flat_fd.push_back(central_diff(
                    [&](double x) {
                        *coord = x;
                        return algebraic_connectivity(weighted_laplacian(probe, 1.0)).lambda2;
                    },
                    *coord, h));
            }
        }
        worst_b = std::max(worst_b, rel_vec_err(flat_an, flat_fd));
    }

    // (c) end-to-end train_step gradient, h = 1e-4, rel err < 1e-3
    double worst_c = 0.0;
    seed = 50000;
    for (int done = 0; done < 20;) {
        const SwarmState st = random_connected_state(seed++, 5, 0.55);
        if (!fd_safe_state(st, 1.0, 2e-3)) continue;
        PolicyNet net = PolicyNet::init(seed, done % 2 == 0 ? Aggregation::kMax : Aggregation::kMean);
        bool safe = true;
        for (int i = 0; i < st.size() && safe; ++i) {
            const Observation obs = observe(st, i, 1.0);
            if (obs.empty()) continue;
            GradientTape tape;
            net.forward(t_pre(obs, frame_of(obs)), tape);
            safe = taped_pass_is_fd_safe(net, tape, 1e-3);
        }
        if (!safe) continue;
        ++done;

        const std::vector<double> analytic = train_step(net, st, 1.0, 1.0, 1.0, 0.05).param_grads;
        Controller c;
        c.kind = Controller::Kind::kNetwork;
        c.net = &net;
        c.s_max = 0.05;
        auto loss_now = [&] {
            return total_loss(step(st, c, 1.0), 1.0, 1.0, 1.0).total.value;
        };
        auto& params = net.mutable_parameters();
        std::vector<double> fd(params.size());
        const double h = 1e-4;
        for (std::size_t k = 0; k < params.size(); ++k) {
            fd[k] = central_diff(
                [&](double x) {
                    const double keep = params[k];
                    params[k] = x;
                    const double out = loss_now();
                    params[k] = keep;
                    return out;
                },
                params[k], h);
        }
        worst_c = std::max(worst_c, rel_vec_err(analytic, fd));
    }

    const bool ok = worst_a < 1e-4 && worst_b < 1e-5 && worst_c < 1e-3;
    return {ok, fmt("worst rel err: network backward %.2e (tol 1e-4, 100 cases), lambda2 grad "
                    "%.2e (tol 1e-5, 100 cases), end-to-end %.2e (tol 1e-3, 20 cases)",
                    worst_a, worst_b, worst_c)};
}

// ---- 5: spectral / connectivity oracles -------------------------------------

Outcome criterion_5(const std::string&) {
    Pcg32 rng(20240501, 1);

    int connected_cases = 0, disconnected_cases = 0;
    bool equiv_ok = true;
    double min_conn_l2 = 1e300, max_disc_l2 = 0.0;
    for (int i = 0; i < 500; ++i) {
        const int n = 2 + static_cast<int>(rng.next_below(9));
        const double side = rng.uniform(0.8, 3.0) * std::sqrt(static_cast<double>(n));
        SwarmState st;
        for (int j = 0; j < n; ++j)
            st.positions.push_back({rng.uniform(0, side), rng.uniform(0, side)});
        const bool connected = is_cohesive(build_visibility_graph(st, 1.0));
        const double l2 = algebraic_connectivity(weighted_laplacian(st, 1.0)).lambda2;
        (connected ? connected_cases : disconnected_cases)++;
        if (connected) {
            min_conn_l2 = std::min(min_conn_l2, l2);
            equiv_ok = equiv_ok && l2 > 1e-10;
        } else {
            max_disc_l2 = std::max(max_disc_l2, l2);
            equiv_ok = equiv_ok && l2 <= 1e-10;
        }
    }

    // Cheeger: exhaustive cut enumeration, h(G) >= lambda2 / 2
    double min_slack = 1e300;
    for (int i = 0; i < 200; ++i) {
        const int n = 2 + static_cast<int>(rng.next_below(7));
        const double side = rng.uniform(0.7, 1.8) * std::sqrt(static_cast<double>(n));
        SwarmState st;
        for (int j = 0; j < n; ++j)
            st.positions.push_back({rng.uniform(0, side), rng.uniform(0, side)});
        const WeightedVisibilityGraph g = weighted_laplacian(st, 1.0);
        const double bound = cheeger_lower_bound(g);
        double h = 1e300;
        for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
            double cut = 0.0;
            int size = 0;
            for (int a = 0; a < n; ++a) {
                if (!((mask >> a) & 1)) continue;
                ++size;
                for (int b = 0; b < n; ++b)
                    if (!((mask >> b) & 1)) cut += g.adjacency.at(a, b);
            }
            h = std::min(h, cut / std::min(size, n - size));
        }
        min_slack = std::min(min_slack, h - bound);
    }

    const bool ok = equiv_ok && min_slack >= -1e-12 && connected_cases > 50 &&
                    disconnected_cases > 50;
    return {ok, fmt("lambda2=0 iff disconnected at 1e-10 on 500 graphs (%d conn, min l2 %.2e; %d "
                    "disc, max l2 %.2e); Cheeger h >= l2/2 on 200 graphs, min slack %.2e",
                    connected_cases, min_conn_l2, disconnected_cases, max_disc_l2, min_slack)};
}

// ---- 6: analytical baseline on Regular scenarios ----------------------------

Outcome criterion_6(const std::string& out_dir) {
    GeneratorConfig cfg;
    cfg.num_agents = 10;
    cfg.visibility_ratio = 0.5;
    cfg.seed = 4242;
    const Dataset data = generate_dataset(cfg, 50);

    Controller c;
    const EvalReport r = evaluate(c, data, default_params(), "analytical");
    save_report(r, out_dir + "/c6_analytical_regular");

    const bool ok = r.stayed_connected_rate == 1.0 && r.convergence_rate == 1.0;
    return {ok, fmt("analytical on 50 Regular 10-agent scenarios: stayed connected %.0f%%, "
                    "converged %.0f%% within 2500 steps (required: 100%% / 100%%); mean steps %.1f",
                    100.0 * r.stayed_connected_rate, 100.0 * r.convergence_rate,
                    r.mean_convergence_steps)};
}

// ---- 7: generator validity ---------------------------------------------------

Outcome criterion_7(const std::string&) {
    const char* presets[] = {"regular", "vr625", "challenging", "vr875", "marginal"};
    int connected = 0, deterministic = 0;
    const int per_preset = 100;
    for (const char* name : presets) {
        const Profile* prof = find_profile(name);
        for (int i = 0; i < per_preset; ++i) {
            GeneratorConfig cfg;
            cfg.num_agents = 10;
            cfg.visibility_ratio = prof->visibility_ratio;
            cfg.seed = 7000 + i;
            const SwarmState st = generate_constellation(cfg);
            if (is_cohesive(build_visibility_graph(st, effective_visibility(cfg)))) ++connected;
            const SwarmState again = generate_constellation(cfg);
            bool same = st.size() == again.size();
            for (int a = 0; same && a < st.size(); ++a)
                same = bit_equal(st.positions[a].x, again.positions[a].x) &&
                       bit_equal(st.positions[a].y, again.positions[a].y);
            if (same) ++deterministic;
        }
    }
    const int total = 5 * per_preset;
    return {connected == total && deterministic == total,
            fmt("%d/%d constellations connected under V_eff, %d/%d bit-identical on regeneration "
                "(required: all, across 5 presets)",
                connected, total, deterministic, total)};
}

// ---- 8: throughput -----------------------------------------------------------

Outcome criterion_8(const std::string&) {
    Pcg32 rng(20240801, 1);
    const PolicyNet net = PolicyNet::init(99, Aggregation::kMax);
    const Observation obs = random_clear_observation(rng, 9, 9);

    // warm up, then time the full single-agent pipeline (t_pre, net, t_post)
    double sink = 0.0;
    for (int i = 0; i < 1000; ++i) sink += network_action(net, obs).step_size;
    const int iters = 50000;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i) {
        const Action a = network_action(net, obs);
        sink += a.step_size + a.direction.x;
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();
    const double rate = iters / secs;
    return {rate >= 1000.0 && sink != 0.0,
            fmt("single-agent pipeline: %.0f evaluations/s on one core (required: >= 1000; 9 "
                "bearings, max variant)",
                rate)};
}

// ---- 9: desk-scale training reproduction -------------------------------------

Outcome criterion_9(const std::string& out_dir) {
    const std::string train_dir = out_dir + "/c9_train";
    std::filesystem::create_directories(train_dir);

    std::vector<CurriculumStage> stages;
    for (const CurriculumStage& s : builtin_curriculum()) {
        if (s.group != 'A' && s.group != 'B') continue;
        CurriculumStage picked = s;
        picked.epochs = std::min(picked.epochs, 10);
        stages.push_back(picked);
    }

    GeneratorConfig base_cfg;
    base_cfg.num_agents = 10;

    TrainOptions topt;
    topt.seed = 7;
    topt.checkpoint_dir = train_dir;
    std::ofstream log(train_dir + "/train_log.csv");
    topt.log = &log;  // run_curriculum writes the header

    PolicyNet net = run_curriculum(PolicyNet::init(7, Aggregation::kMax), stages, base_cfg, topt);
    net.save(train_dir + "/policy.json");
    log.close();

    GeneratorConfig eval_cfg;
    eval_cfg.num_agents = 10;
    eval_cfg.visibility_ratio = 0.5;
    eval_cfg.seed = 990000;
    const Dataset data = generate_dataset(eval_cfg, 100);
    const std::string ds_path = out_dir + "/c9_regular.jsonl";
    save_dataset(data, ds_path);

    Controller net_c;
    net_c.kind = Controller::Kind::kNetwork;
    net_c.net = &net;
    const EvalReport rn = evaluate(net_c, data, default_params(), "net-max-1to1", ds_path);
    save_report(rn, out_dir + "/c9_eval_net");
    const EvalReport ra = evaluate(Controller{}, data, default_params(), "analytical", ds_path);
    save_report(ra, out_dir + "/c9_eval_analytical");

    const bool faster = rn.converged_count > 0 && ra.converged_count > 0 &&
                        rn.mean_convergence_steps <= ra.mean_convergence_steps;
    const bool ok = rn.convergence_rate >= 0.8 && rn.full_connectivity_rate >= 0.8 && faster;
    return {ok, fmt("trained max-variant (groups A+B, epochs<=10, seed 7) on 100 Regular "
                    "scenarios: convergence %.2f (req >= 0.8), full connectivity %.2f (req >= "
                    "0.8), mean steps %.1f vs analytical %.1f (req <=)",
                    rn.convergence_rate, rn.full_connectivity_rate, rn.mean_convergence_steps,
                    ra.mean_convergence_steps)};
}

// ---- 10: ablation harness ------------------------------------------------------

Outcome criterion_10(const std::string& out_dir) {
    struct Variant {
        const char* label;
        Aggregation agg;
        double alpha, beta;
    };
    const Variant variants[] = {
        {"max_1to1", Aggregation::kMax, 1.0, 1.0},
        {"mean_1to1", Aggregation::kMean, 1.0, 1.0},
        {"max_1to10", Aggregation::kMax, 1.0, 10.0},
        {"mean_1to10", Aggregation::kMean, 1.0, 10.0},
    };

    // tiny but real training for the variants criterion 9 did not produce
    std::vector<CurriculumStage> mini;
    for (const CurriculumStage& s : builtin_curriculum()) {
        if (s.group != 'A') continue;
        CurriculumStage picked = s;
        picked.epochs = std::min(picked.epochs, 2);
        mini.push_back(picked);
    }

    GeneratorConfig eval_cfg;
    eval_cfg.num_agents = 10;
    eval_cfg.visibility_ratio = 0.5;
    eval_cfg.seed = 991000;
    const Dataset data = generate_dataset(eval_cfg, 30);
    const std::string ds_path = out_dir + "/c10_regular.jsonl";
    save_dataset(data, ds_path);

    std::vector<EvalReport> reports;
    const std::string c9_policy = out_dir + "/c9_train/policy.json";
    for (const Variant& v : variants) {
        PolicyNet net = [&] {
            if (v.agg == Aggregation::kMax && v.alpha == 1.0 && v.beta == 1.0 &&
                std::filesystem::exists(c9_policy))
                return PolicyNet::load(c9_policy);
            GeneratorConfig base_cfg;
            base_cfg.num_agents = 10;
            TrainOptions topt;
            topt.alpha = v.alpha;
            topt.beta = v.beta;
            topt.seed = 7;
            return run_curriculum(PolicyNet::init(7, v.agg), mini, base_cfg, topt);
        }();
        net.save(out_dir + fmt("/c10_%s.json", v.label));
        Controller c;
        c.kind = Controller::Kind::kNetwork;
        c.net = &net;
        reports.push_back(evaluate(c, data, default_params(), v.label, ds_path));
        save_report(reports.back(), out_dir + fmt("/c10_eval_%s", v.label));
    }
    reports.push_back(evaluate(Controller{}, data, default_params(), "analytical", ds_path));
    save_report(reports.back(), out_dir + "/c10_eval_analytical");

    const CompareResult cr = compare_reports(reports);
    const std::string abl_dir = out_dir + "/c10_ablation";
    std::filesystem::create_directories(abl_dir);
    const std::pair<const char*, const std::string*> files[] = {
        {"compare.txt", &cr.table},
        {"compare.csv", &cr.table_csv},
        {"series.csv", &cr.series_csv},
        {"grouped.csv", &cr.grouped_csv},
    };
    for (const auto& [name, body] : files) {
        std::ofstream f(abl_dir + "/" + name);
        f << *body;
        if (!f) return {false, fmt("failed writing %s/%s", abl_dir.c_str(), name)};
    }

    int grouped_rows = -1;  // header excluded
    for (char ch : cr.grouped_csv)
        if (ch == '\n') ++grouped_rows;
    const bool ok = grouped_rows == 5;
    return {ok, fmt("ablation grid (max/mean x 1:1/1:10, plus analytical) evaluated on 30 shared "
                    "scenarios; grouped CSV has %d data rows (required: 5) in %s",
                    grouped_rows, abl_dir.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    int criterion = 0;
    std::string out_dir = "acceptance_artifacts";
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            criterion = std::atoi(argv[++i]);
        else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc)
            out_dir = argv[++i];
        else {
            std::fprintf(stderr, "usage: acceptance --criterion N [--out DIR]\n");
            return 1;
        }
    }
    using Fn = Outcome (*)(const std::string&);
    const Fn table[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                        criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    if (criterion < 1 || criterion > 10) {
        std::fprintf(stderr, "usage: acceptance --criterion N [--out DIR]\n");
        return 1;
    }
    std::filesystem::create_directories(out_dir);
    Outcome o;
    try {
        o = table[criterion - 1](out_dir);
    } catch (const std::exception& e) {
        o = {false, fmt("unhandled exception: %s", e.what())};
    }
    std::printf("criterion %d: %s - %s\n", criterion, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    return o.pass ? 0 : 1;
}

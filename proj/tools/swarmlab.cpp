// Command-line front end: dataset generation, curriculum training,
// evaluation, report comparison, and single-scenario replay.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.
// Errors are one line on stderr: "swarmlab: error: <message>".

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "swarmlab/datagen.hpp"
#include "swarmlab/errors.hpp"
#include "swarmlab/eval.hpp"
#include "swarmlab/manifest.hpp"
#include "swarmlab/simulator.hpp"
#include "swarmlab/training.hpp"

namespace {

using namespace swarmlab;

constexpr const char* kToolVersion = "1.0.0";

int default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

nlohmann::json tool_info() {
    return {{"name", "swarmlab"}, {"version", kToolVersion}};
}

void ensure_parent_dir(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --controller value: "analytical" or "net:<checkpoint.json>".
const CLI::Validator kControllerSpec(
    [](std::string& s) -> std::string {
        if (s == "analytical") return {};
        if (s.rfind("net:", 0) == 0 && s.size() > 4) return {};
        return "expected 'analytical' or 'net:<checkpoint>'";
    },
    "CONTROLLER");

// Owns the optional network; the Controller view is built on demand so no
// pointer into this struct can dangle across moves.
struct ControllerBox {
    std::optional<PolicyNet> net;
    double s_max = kDefaultSMaxFactor;
    std::string checkpoint;  // empty for the analytical rule

    Controller get() const {
        Controller c;
        c.s_max = s_max;
        if (net) {
            c.kind = Controller::Kind::kNetwork;
            c.net = &*net;
        }
        return c;
    }
};

ControllerBox make_controller(const std::string& spec, double s_max) {
    ControllerBox box;
    box.s_max = s_max;
    if (spec == "analytical") return box;
    box.checkpoint = spec.substr(4);
    box.net = PolicyNet::load(box.checkpoint);
    return box;
}

// ---- gen ----------------------------------------------------------------

struct GenOpts {
    std::string profile;
    int agents = 10;
    double vr = 0.5;
    double visibility = 1.0;
    int count = 0;
    std::uint64_t seed = 0;
    std::string out;
    double boundary = 0.0;
    int max_attempts = 1000;
    int jobs = default_jobs();
};

int cmd_gen(const GenOpts& o, const CLI::App& sub) {
    GeneratorConfig cfg;
    cfg.visibility = o.visibility;
    cfg.initial_boundary = o.boundary;
    cfg.max_attempts = o.max_attempts;
    cfg.seed = o.seed;
    if (!o.profile.empty()) {
        const Profile* p = find_profile(o.profile);
        cfg.visibility_ratio = p->visibility_ratio;
        if (p->num_agents > 0) cfg.num_agents = p->num_agents;
    }
    if (o.profile.empty() || sub.count("--agents")) cfg.num_agents = o.agents;
    if (o.profile.empty() || sub.count("--vr")) cfg.visibility_ratio = o.vr;

    // items depend only on cfg.seed + i, so a parallel fill matches the
    // sequential generator byte for byte
    Dataset ds;
    ds.config = cfg;
    ds.items.resize(o.count);
    parallel_for(o.count, o.jobs, [&](int i) {
        GeneratorConfig item_cfg = cfg;
        item_cfg.seed = cfg.seed + static_cast<std::uint64_t>(i);
        try {
            ds.items[i] = {item_cfg.seed, generate_constellation(item_cfg)};
        } catch (const NumericError& e) {
            throw NumericError("dataset item " + std::to_string(i) + ": " + e.what());
        }
    });

    ensure_parent_dir(o.out);
    save_dataset(ds, o.out);

    write_manifest(o.out + ".manifest.json",
                   {{"command", "gen"},
                    {"tool", tool_info()},
                    {"formats", {{"dataset", 1}}},
                    {"config",
                     {{"profile", o.profile},
                      {"agents", cfg.num_agents},
                      {"vr", cfg.visibility_ratio},
                      {"visibility", cfg.visibility},
                      {"count", o.count},
                      {"seed", cfg.seed},
                      {"boundary", cfg.initial_boundary},
                      {"max_attempts", cfg.max_attempts}}},
                    {"inputs", nlohmann::json::array()},
                    {"outputs", {manifest_entry(o.out)}}});

    std::printf("wrote %d scenarios (%d agents, vr %g) to %s\n", o.count, cfg.num_agents,
                cfg.visibility_ratio, o.out.c_str());
    return 0;
}

// ---- train --------------------------------------------------------------

struct TrainCmdOpts {
    std::string curriculum = "builtin";
    std::string groups = "ABC";
    int epoch_cap = 0;
    std::string agg = "max";
    int agents = 10;
    double alpha = 1.0;
    double beta = 1.0;
    double visibility = 1.0;
    double s_max = -1.0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_train(const TrainCmdOpts& o) {
    std::vector<CurriculumStage> stages;
    for (const CurriculumStage& s : builtin_curriculum()) {
        if (o.groups.find(s.group) == std::string::npos) continue;
        CurriculumStage picked = s;
        if (o.epoch_cap > 0) picked.epochs = std::min(picked.epochs, o.epoch_cap);
        stages.push_back(picked);
    }
    if (stages.empty()) throw DataError("train: no curriculum stages match groups '" + o.groups + "'");

    std::filesystem::create_directories(o.out);
    std::ofstream log(o.out + "/train_log.csv");
    if (!log) throw DataError("cannot write " + o.out + "/train_log.csv");

    GeneratorConfig base_cfg;
    base_cfg.num_agents = o.agents;

    TrainOptions topt;
    topt.visibility = o.visibility;
    topt.alpha = o.alpha;
    topt.beta = o.beta;
    topt.s_max = o.s_max > 0 ? o.s_max : kDefaultSMaxFactor * o.visibility;
    topt.seed = o.seed;
    topt.checkpoint_dir = o.out;
    topt.log = &log;

    PolicyNet net = PolicyNet::init(o.seed, aggregation_from_name(o.agg));
    net = run_curriculum(std::move(net), stages, base_cfg, topt);
    net.save(o.out + "/policy.json");
    log.close();

    nlohmann::json outputs = nlohmann::json::array();
    char name[32];
    for (const CurriculumStage& s : stages) {
        std::snprintf(name, sizeof name, "/stage_%02d.json", s.stage_id);
        outputs.push_back(manifest_entry(o.out + name));
    }
    outputs.push_back(manifest_entry(o.out + "/policy.json"));
    outputs.push_back(manifest_entry(o.out + "/train_log.csv"));
    write_manifest(o.out + "/manifest.json",
                   {{"command", "train"},
                    {"tool", tool_info()},
                    {"formats", {{"policy", 1}}},
                    {"config",
                     {{"curriculum", o.curriculum},
                      {"groups", o.groups},
                      {"epoch_cap", o.epoch_cap},
                      {"agg", o.agg},
                      {"agents", o.agents},
                      {"alpha", o.alpha},
                      {"beta", o.beta},
                      {"visibility", o.visibility},
                      {"s_max", topt.s_max},
                      {"seed", o.seed}}},
                    {"inputs", nlohmann::json::array()},
                    {"outputs", std::move(outputs)}});

    std::printf("trained %zu stages (groups %s, agg %s) into %s\n", stages.size(),
                o.groups.c_str(), o.agg.c_str(), o.out.c_str());
    return 0;
}

// ---- eval ---------------------------------------------------------------

struct EvalCmdOpts {
    std::string controller;
    std::string dataset;
    std::string out;
    std::string label;
    int max_steps = kDefaultMaxSteps;
    double conv_threshold = -1.0;
    double visibility = 1.0;
    double s_max = -1.0;
    int jobs = default_jobs();
};

int cmd_eval(const EvalCmdOpts& o) {
    const Dataset data = load_dataset(o.dataset);
    const ControllerBox box =
        make_controller(o.controller, o.s_max > 0 ? o.s_max : kDefaultSMaxFactor * o.visibility);

    EvalParams p;
    p.visibility = o.visibility;
    p.max_steps = o.max_steps;
    p.conv_threshold = o.conv_threshold > 0 ? o.conv_threshold : kDefaultConvFactor * o.visibility;
    p.jobs = o.jobs;

    const std::string desc = o.label.empty() ? o.controller : o.label;
    const EvalReport r = evaluate(box.get(), data, p, desc, o.dataset);
    save_report(r, o.out);

    nlohmann::json inputs{manifest_entry(o.dataset)};
    if (!box.checkpoint.empty()) inputs.push_back(manifest_entry(box.checkpoint));
    write_manifest(o.out + "/manifest.json",
                   {{"command", "eval"},
                    {"tool", tool_info()},
                    {"formats", {{"dataset", 1}, {"policy", 1}, {"report", 1}}},
                    {"config",
                     {{"controller", o.controller},
                      {"label", desc},
                      {"dataset", o.dataset},
                      {"max_steps", p.max_steps},
                      {"conv_threshold", p.conv_threshold},
                      {"visibility", p.visibility},
                      {"s_max", box.s_max},
                      {"jobs", o.jobs}}},
                    {"inputs", std::move(inputs)},
                    {"outputs",
                     {manifest_entry(o.out + "/report.json"),
                      manifest_entry(o.out + "/scenarios.csv"),
                      manifest_entry(o.out + "/series.csv")}}});

    std::printf("%s on %s: convergence %.3f (%d/%d), mean steps %.1f, dr %.2f%%\n", desc.c_str(),
                o.dataset.c_str(), r.convergence_rate, r.converged_count, r.scenario_count,
                r.mean_convergence_steps, r.disconnection_ratio);
    return 0;
}

// ---- compare ------------------------------------------------------------

struct CompareCmdOpts {
    std::vector<std::string> reports;
    std::string out;
};

int cmd_compare(const CompareCmdOpts& o) {
    std::vector<EvalReport> reports;
    reports.reserve(o.reports.size());
    for (const std::string& path : o.reports) reports.push_back(load_report(path));
    const CompareResult cr = compare_reports(reports);

    std::filesystem::create_directories(o.out);
    const std::pair<const char*, const std::string*> files[] = {
        {"compare.txt", &cr.table},
        {"compare.csv", &cr.table_csv},
        {"series.csv", &cr.series_csv},
        {"grouped.csv", &cr.grouped_csv},
    };
    for (const auto& [name, body] : files) {
        std::ofstream f(o.out + "/" + name);
        if (!(f << *body)) throw DataError("cannot write " + o.out + "/" + name);
    }

    nlohmann::json inputs = nlohmann::json::array();
    for (const std::string& path : o.reports) inputs.push_back(manifest_entry(path));
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& [name, body] : files) outputs.push_back(manifest_entry(o.out + "/" + name));
    write_manifest(o.out + "/manifest.json", {{"command", "compare"},
                                              {"tool", tool_info()},
                                              {"formats", {{"report", 1}}},
                                              {"config", {{"reports", o.reports}}},
                                              {"inputs", std::move(inputs)},
                                              {"outputs", std::move(outputs)}});

    std::fputs(cr.table.c_str(), stdout);
    return 0;
}

// ---- replay -------------------------------------------------------------

struct ReplayCmdOpts {
    std::string dataset;
    int index = 0;
    std::string controller;
    std::string out;
    int max_steps = kDefaultMaxSteps;
    double conv_threshold = -1.0;
    double visibility = 1.0;
    double s_max = -1.0;
};

int cmd_replay(const ReplayCmdOpts& o) {
    const Dataset data = load_dataset(o.dataset);
    if (o.index < 0 || o.index >= static_cast<int>(data.items.size()))
        throw DataError("replay: index " + std::to_string(o.index) + " out of range (dataset has " +
                        std::to_string(data.items.size()) + " scenarios)");
    const ControllerBox box =
        make_controller(o.controller, o.s_max > 0 ? o.s_max : kDefaultSMaxFactor * o.visibility);

    RolloutOptions opt;
    opt.max_steps = o.max_steps;
    opt.conv_threshold = o.conv_threshold > 0 ? o.conv_threshold : kDefaultConvFactor * o.visibility;
    opt.record_positions = true;
    const auto [res, traj] = rollout(data.items[o.index].state, box.get(), o.visibility, opt);

    ensure_parent_dir(o.out);
    std::ofstream f(o.out);
    if (!f) throw DataError("cannot write " + o.out);
    f << "step,agent,x,y\n";
    for (std::size_t t = 0; t < traj.positions.size(); ++t)
        for (std::size_t i = 0; i < traj.positions[t].size(); ++i)
            f << t << ',' << i << ',' << fmt_double(traj.positions[t][i].x) << ','
              << fmt_double(traj.positions[t][i].y) << '\n';
    if (!f) throw DataError("write failed: " + o.out);
    f.close();

    nlohmann::json inputs{manifest_entry(o.dataset)};
    if (!box.checkpoint.empty()) inputs.push_back(manifest_entry(box.checkpoint));
    write_manifest(o.out + ".manifest.json",
                   {{"command", "replay"},
                    {"tool", tool_info()},
                    {"formats", {{"dataset", 1}, {"policy", 1}}},
                    {"config",
                     {{"dataset", o.dataset},
                      {"index", o.index},
                      {"controller", o.controller},
                      {"max_steps", o.max_steps},
                      {"conv_threshold", opt.conv_threshold},
                      {"visibility", o.visibility},
                      {"s_max", box.s_max}}},
                    {"inputs", std::move(inputs)},
                    {"outputs", {manifest_entry(o.out)}}});

    std::printf("replay %d: steps=%d converged=%d stayed_connected=%d final_max_dist=%s\n",
                o.index, res.steps_executed, res.converged ? 1 : 0, res.stayed_connected ? 1 : 0,
                fmt_double(traj.records.back().max_centroid_dist).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swarm gathering lab: datasets, curriculum training, evaluation"};
    app.set_version_flag("--version", std::string("swarmlab ") + kToolVersion);
    app.set_config("--config", "", "INI config file; one [section] per subcommand, flags win");
    app.allow_config_extras(false);
    app.require_subcommand(1);

    std::vector<std::string> profile_names;
    for (const Profile& p : kProfiles) profile_names.push_back(p.name);

    GenOpts g;
    CLI::App* gen = app.add_subcommand("gen", "generate a constellation dataset (JSON lines)");
    gen->add_option("--profile", g.profile, "difficulty preset")
        ->check(CLI::IsMember(profile_names));
    gen->add_option("--agents", g.agents, "agents per constellation")->check(CLI::PositiveNumber);
    gen->add_option("--vr", g.vr, "visibility ratio in (0, 1]")
        ->check(CLI::Range(1e-9, 1.0));
    gen->add_option("--visibility", g.visibility, "visibility radius V")
        ->check(CLI::PositiveNumber);
    gen->add_option("--count", g.count, "number of scenarios")
        ->required()
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed", g.seed, "base seed; item i uses seed+i");
    gen->add_option("--out", g.out, "output dataset path (.jsonl)")->required();
    gen->add_option("--boundary", g.boundary, "initial square side (default 2*V*sqrt(N))");
    gen->add_option("--max-attempts", g.max_attempts, "rejection budget per agent")
        ->check(CLI::PositiveNumber);
    gen->add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);

    TrainCmdOpts t;
    CLI::App* train = app.add_subcommand("train", "run the training curriculum");
    train->add_option("--curriculum", t.curriculum, "curriculum name")
        ->check(CLI::IsMember({"builtin"}));
    train->add_option("--groups", t.groups, "stage groups to run, e.g. AB")
        ->check(CLI::Validator(
            [](std::string& s) -> std::string {
                if (s.empty()) return "must not be empty";
                for (char ch : s)
                    if (ch != 'A' && ch != 'B' && ch != 'C') return "only characters A, B, C";
                return {};
            },
            "GROUPS"));
    train->add_option("--epoch-cap", t.epoch_cap, "cap epochs per stage (0 = full)")
        ->check(CLI::NonNegativeNumber);
    train->add_option("--agg", t.agg, "feature aggregation")->check(CLI::IsMember({"max", "mean"}));
    train->add_option("--agents", t.agents, "agents per training constellation")
        ->check(CLI::PositiveNumber);
    train->add_option("--alpha", t.alpha, "cohesiveness weight")->check(CLI::NonNegativeNumber);
    train->add_option("--beta", t.beta, "task weight")->check(CLI::NonNegativeNumber);
    train->add_option("--visibility", t.visibility, "visibility radius V")
        ->check(CLI::PositiveNumber);
    train->add_option("--s-max", t.s_max, "max step length (default 0.05*V)");
    train->add_option("--seed", t.seed, "seed for init and stage datasets");
    train->add_option("--out", t.out, "checkpoint/log directory")->required();

    EvalCmdOpts e;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a controller over a dataset");
    eval->add_option("--controller", e.controller, "analytical or net:<checkpoint>")
        ->required()
        ->check(kControllerSpec);
    eval->add_option("--dataset", e.dataset, "dataset file")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--out", e.out, "report directory")->required();
    eval->add_option("--label", e.label, "controller name in reports (default: --controller value)");
    eval->add_option("--max-steps", e.max_steps, "step cap per scenario")
        ->check(CLI::NonNegativeNumber);
    eval->add_option("--conv-threshold", e.conv_threshold,
                     "convergence threshold (default 0.5*V)");
    eval->add_option("--visibility", e.visibility, "visibility radius V")
        ->check(CLI::PositiveNumber);
    eval->add_option("--s-max", e.s_max, "max step length (default 0.05*V)");
    eval->add_option("--jobs", e.jobs, "worker threads")->check(CLI::PositiveNumber);

    CompareCmdOpts c;
    CLI::App* compare = app.add_subcommand("compare", "tabulate reports that share a scenario set");
    compare->add_option("--reports", c.reports, "two or more report.json files")
        ->required()
        ->expected(2, -1)
        ->check(CLI::ExistingFile);
    compare->add_option("--out", c.out, "output directory")->required();

    ReplayCmdOpts r;
    CLI::App* replay = app.add_subcommand("replay", "dump one scenario's trajectory as CSV");
    replay->add_option("--dataset", r.dataset, "dataset file")
        ->required()
        ->check(CLI::ExistingFile);
    replay->add_option("--index", r.index, "scenario index")->check(CLI::NonNegativeNumber);
    replay->add_option("--controller", r.controller, "analytical or net:<checkpoint>")
        ->required()
        ->check(kControllerSpec);
    replay->add_option("--out", r.out, "output CSV path")->required();
    replay->add_option("--max-steps", r.max_steps, "step cap (0 = initial state only)")
        ->check(CLI::NonNegativeNumber);
    replay->add_option("--conv-threshold", r.conv_threshold,
                       "convergence threshold (default 0.5*V)");
    replay->add_option("--visibility", r.visibility, "visibility radius V")
        ->check(CLI::PositiveNumber);
    replay->add_option("--s-max", r.s_max, "max step length (default 0.05*V)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) return app.exit(err);  // --help / --version
        std::fprintf(stderr, "swarmlab: error: %s\n", err.what());
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen(g, *gen);
        if (train->parsed()) return cmd_train(t);
        if (eval->parsed()) return cmd_eval(e);
        if (compare->parsed()) return cmd_compare(c);
        if (replay->parsed()) return cmd_replay(r);
    } catch (const DataError& err) {
        std::fprintf(stderr, "swarmlab: error: %s\n", err.what());
        return 2;
    } catch (const NumericError& err) {
        std::fprintf(stderr, "swarmlab: error: %s\n", err.what());
        return 3;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "swarmlab: error: %s\n", err.what());
        return 3;
    }
    return 0;
}

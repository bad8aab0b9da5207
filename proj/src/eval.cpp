#include "swarmlab/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "swarmlab/errors.hpp"
#include "swarmlab/manifest.hpp"

namespace swarmlab {

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mx;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mx);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

EvalReport evaluate(const Controller& c, const Dataset& data, const EvalParams& p,
                    const std::string& controller_desc, const std::string& dataset_path) {
    EvalReport r;
    r.controller = controller_desc;
    r.dataset_path = dataset_path;
    if (!dataset_path.empty()) r.dataset_hash = file_hash_hex(dataset_path);
    r.num_agents = data.config.num_agents;
    r.visibility_ratio = data.config.visibility_ratio;
    r.params = p;

    const int n = static_cast<int>(data.items.size());
    r.rows.resize(n);
    std::vector<std::vector<double>> dist(n);
    const RolloutOptions opt{p.max_steps, p.conv_threshold, false};
    parallel_for(n, p.jobs, [&](int i) {
        const auto [res, traj] = rollout(data.items[i].state, c, p.visibility, opt);
        ScenarioRow& row = r.rows[i];
        row.index = i;
        row.seed = data.items[i].seed;
        row.converged = res.converged;
        row.convergence_step = res.convergence_step.value_or(-1);
        row.stayed_connected = res.stayed_connected;
        row.first_disconnection_step = res.first_disconnection_step.value_or(-1);
        row.largest_fraction_final = res.largest_fraction_final;
        row.steps_executed = res.steps_executed;
        dist[i].reserve(traj.records.size());
        for (const StepRecord& rec : traj.records) dist[i].push_back(rec.max_centroid_dist);
    });
    aggregate_rows(r, dist);
    return r;
}

void aggregate_rows(EvalReport& r, const std::vector<std::vector<double>>& dist_series) {
    const int n = static_cast<int>(r.rows.size());
    r.scenario_count = n;
    int conv = 0, full = 0, stayed = 0;
    double steps_sum = 0.0, dr_sum = 0.0;
    for (const ScenarioRow& row : r.rows) {
        if (row.converged) {
            ++conv;
            steps_sum += row.convergence_step;
        }
        if (row.largest_fraction_final == 1.0) ++full;
        if (row.stayed_connected) ++stayed;
        dr_sum += 100.0 * (1.0 - row.largest_fraction_final);
    }
    r.converged_count = conv;
    r.convergence_rate = n > 0 ? static_cast<double>(conv) / n : 0.0;
    r.mean_convergence_steps = conv > 0 ? steps_sum / conv : 0.0;
    r.full_connectivity_rate = n > 0 ? static_cast<double>(full) / n : 0.0;
    r.stayed_connected_rate = n > 0 ? static_cast<double>(stayed) / n : 0.0;
    r.disconnection_ratio = n > 0 ? dr_sum / n : 0.0;

    std::size_t len = 0;
    for (const auto& s : dist_series) len = std::max(len, s.size());
    r.series.assign(len, {});
    if (dist_series.empty()) return;
    for (std::size_t t = 0; t < len; ++t) {
        double sum = 0.0;
        for (const auto& s : dist_series) sum += t < s.size() ? s[t] : s.back();
        const double mean = sum / dist_series.size();
        double var = 0.0;
        for (const auto& s : dist_series) {
            const double d = (t < s.size() ? s[t] : s.back()) - mean;
            var += d * d;
        }
        r.series[t] = {mean, std::sqrt(var / dist_series.size())};
    }
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void save_report(const EvalReport& r, const std::string& dir) {
    std::filesystem::create_directories(dir);

    nlohmann::json series_mean = nlohmann::json::array();
    nlohmann::json series_std = nlohmann::json::array();
    for (const SeriesPoint& sp : r.series) {
        series_mean.push_back(sp.mean);
        series_std.push_back(sp.stddev);
    }
    const nlohmann::json doc{
        {"format", "swarmlab-eval-report"},
        {"version", 1},
        {"controller", r.controller},
        {"dataset",
         {{"path", r.dataset_path},
          {"hash", r.dataset_hash},
          {"num_agents", r.num_agents},
          {"visibility_ratio", r.visibility_ratio}}},
        {"params",
         {{"visibility", r.params.visibility},
          {"max_steps", r.params.max_steps},
          {"conv_threshold", r.params.conv_threshold}}},
        {"aggregates",
         {{"scenario_count", r.scenario_count},
          {"converged_count", r.converged_count},
          {"convergence_rate", r.convergence_rate},
          {"mean_convergence_steps", r.mean_convergence_steps},
          {"full_connectivity_rate", r.full_connectivity_rate},
          {"stayed_connected_rate", r.stayed_connected_rate},
          {"disconnection_ratio", r.disconnection_ratio}}},
        {"series", {{"mean", std::move(series_mean)}, {"stddev", std::move(series_std)}}}};

    std::ofstream jf(dir + "/report.json");
    if (!jf) throw DataError("cannot write " + dir + "/report.json");
    jf << doc.dump(2) << '\n';

    std::ofstream sf(dir + "/scenarios.csv");
    if (!sf) throw DataError("cannot write " + dir + "/scenarios.csv");
    sf << "index,seed,converged,convergence_step,stayed_connected,first_disconnection_step,"
          "largest_fraction_final,steps_executed\n";
    for (const ScenarioRow& row : r.rows)
        sf << row.index << ',' << row.seed << ',' << (row.converged ? 1 : 0) << ','
           << row.convergence_step << ',' << (row.stayed_connected ? 1 : 0) << ','
           << row.first_disconnection_step << ',' << fmt_double(row.largest_fraction_final) << ','
           << row.steps_executed << '\n';

    std::ofstream tf(dir + "/series.csv");
    if (!tf) throw DataError("cannot write " + dir + "/series.csv");
    tf << "step,mean,stddev\n";
    for (std::size_t t = 0; t < r.series.size(); ++t)
        tf << t << ',' << fmt_double(r.series[t].mean) << ',' << fmt_double(r.series[t].stddev)
           << '\n';
    if (!jf || !sf || !tf) throw DataError("write failed under " + dir);
}

EvalReport load_report(const std::string& json_path) {
    std::ifstream f(json_path);
    if (!f) throw DataError("cannot open " + json_path);
    nlohmann::json doc;
    try {
        f >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(json_path + ": " + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "swarmlab-eval-report")
            throw DataError(json_path + ": not an eval report");
        if (doc.at("version").get<int>() != 1)
            throw DataError(json_path + ": unsupported version");
        EvalReport r;
        r.controller = doc.at("controller").get<std::string>();
        const auto& ds = doc.at("dataset");
        r.dataset_path = ds.at("path").get<std::string>();
        r.dataset_hash = ds.at("hash").get<std::string>();
        r.num_agents = ds.at("num_agents").get<int>();
        r.visibility_ratio = ds.at("visibility_ratio").get<double>();
        const auto& pj = doc.at("params");
        r.params.visibility = pj.at("visibility").get<double>();
        r.params.max_steps = pj.at("max_steps").get<int>();
        r.params.conv_threshold = pj.at("conv_threshold").get<double>();
        const auto& ag = doc.at("aggregates");
        r.scenario_count = ag.at("scenario_count").get<int>();
        r.converged_count = ag.at("converged_count").get<int>();
        r.convergence_rate = ag.at("convergence_rate").get<double>();
        r.mean_convergence_steps = ag.at("mean_convergence_steps").get<double>();
        r.full_connectivity_rate = ag.at("full_connectivity_rate").get<double>();
        r.stayed_connected_rate = ag.at("stayed_connected_rate").get<double>();
        r.disconnection_ratio = ag.at("disconnection_ratio").get<double>();
        const auto& sj = doc.at("series");
        const auto& sm = sj.at("mean");
        const auto& sd = sj.at("stddev");
        if (sm.size() != sd.size()) throw DataError(json_path + ": series length mismatch");
        r.series.resize(sm.size());
        for (std::size_t t = 0; t < r.series.size(); ++t)
            r.series[t] = {sm[t].get<double>(), sd[t].get<double>()};
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(json_path + ": " + e.what());
    }
}

namespace {

std::string dataset_label(const EvalReport& r) {
    if (!r.dataset_path.empty())
        return std::filesystem::path(r.dataset_path).filename().string();
    return r.dataset_hash.empty() ? std::string("<memory>") : r.dataset_hash.substr(0, 8);
}

}  // namespace

CompareResult compare_reports(const std::vector<EvalReport>& reports) {
    if (reports.size() < 2) throw DataError("compare: need at least two reports");

    // Group by scenario set; a shared set means a shared dataset hash (or
    // identical path when no hash was recorded).
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const std::string key = reports[i].dataset_hash.empty() ? "path:" + reports[i].dataset_path
                                                                : "hash:" + reports[i].dataset_hash;
        groups[key].push_back(i);
    }
    bool any_shared = false;
    for (const auto& [key, members] : groups) any_shared = any_shared || members.size() >= 2;
    if (!any_shared) throw DataError("compare: reports do not share a scenario set");

    std::ostringstream text, csv, series, grouped;
    csv << "dataset,vr,controller,scenarios,convergence_rate,converged_count,"
           "mean_convergence_steps,cs_ratio,full_connectivity_rate,stayed_connected_rate,"
           "disconnection_ratio\n";
    series << "dataset,controller,step,mean,stddev\n";
    grouped << "dataset,controller,disconnection_ratio,mean_convergence_steps\n";

    for (const auto& [key, members] : groups) {
        if (members.size() < 2) continue;
        const EvalReport& first = reports[members[0]];
        for (std::size_t idx : members) {
            const EvalReport& r = reports[idx];
            if (r.params.max_steps != first.params.max_steps ||
                r.params.conv_threshold != first.params.conv_threshold ||
                r.params.visibility != first.params.visibility ||
                r.scenario_count != first.scenario_count)
                throw DataError("compare: reports on " + dataset_label(first) +
                                " were produced with different evaluation parameters");
        }
        const std::string label = dataset_label(first);
        text << "dataset " << label << " (vr " << first.visibility_ratio << ", "
             << first.scenario_count << " scenarios)\n";
        char line[256];
        std::snprintf(line, sizeof line, "  %-28s %8s %8s %8s %8s %8s %8s\n", "controller",
                      "conv", "steps", "ratio", "fullconn", "stayed", "dr%");
        text << line;
        for (std::size_t idx : members) {
            const EvalReport& r = reports[idx];
            const bool have_ratio = first.mean_convergence_steps > 0.0 && r.converged_count > 0;
            const double ratio = have_ratio
                                     ? r.mean_convergence_steps / first.mean_convergence_steps
                                     : 0.0;
            char ratio_txt[16] = "-";
            if (have_ratio) std::snprintf(ratio_txt, sizeof ratio_txt, "%.3f", ratio);
            std::snprintf(line, sizeof line, "  %-28s %8.3f %8.1f %8s %8.3f %8.3f %8.2f\n",
                          r.controller.c_str(), r.convergence_rate, r.mean_convergence_steps,
                          ratio_txt, r.full_connectivity_rate, r.stayed_connected_rate,
                          r.disconnection_ratio);
            text << line;

            csv << label << ',' << fmt_double(r.visibility_ratio) << ',' << r.controller << ','
                << r.scenario_count << ',' << fmt_double(r.convergence_rate) << ','
                << r.converged_count << ',' << fmt_double(r.mean_convergence_steps) << ','
                << (have_ratio ? fmt_double(ratio) : "") << ','
                << fmt_double(r.full_connectivity_rate) << ','
                << fmt_double(r.stayed_connected_rate) << ','
                << fmt_double(r.disconnection_ratio) << '\n';

            for (std::size_t t = 0; t < r.series.size(); ++t)
                series << label << ',' << r.controller << ',' << t << ','
                       << fmt_double(r.series[t].mean) << ',' << fmt_double(r.series[t].stddev)
                       << '\n';
            grouped << label << ',' << r.controller << ',' << fmt_double(r.disconnection_ratio)
                    << ',' << fmt_double(r.mean_convergence_steps) << '\n';
        }
        text << '\n';
    }
    return {text.str(), csv.str(), series.str(), grouped.str()};
}

}  // namespace swarmlab

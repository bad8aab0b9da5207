#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swarmlab/datagen.hpp"
#include "swarmlab/simulator.hpp"

namespace swarmlab {

struct EvalParams {
    double visibility = 1.0;
    int max_steps = kDefaultMaxSteps;
    double conv_threshold = 0.5;
    int jobs = 1;  // worker threads; results are identical for any job count
};

struct ScenarioRow {
    int index = 0;
    std::uint64_t seed = 0;
    bool converged = false;
    int convergence_step = -1;  // -1: never converged
    bool stayed_connected = true;
    int first_disconnection_step = -1;
    double largest_fraction_final = 1.0;
    int steps_executed = 0;
};

struct SeriesPoint {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

/// Aggregated evaluation of one controller over one scenario set.
/// mean_convergence_steps averages converged scenarios only;
/// converged_count says how many that is. The per-step series extends
/// shorter rollouts by holding their final value.
struct EvalReport {
    std::string controller;
    std::string dataset_path;
    std::string dataset_hash;  // empty for in-memory datasets
    int scenario_count = 0;
    int num_agents = 0;
    double visibility_ratio = 0.0;
    EvalParams params;

    int converged_count = 0;
    double convergence_rate = 0.0;
    double mean_convergence_steps = 0.0;  // 0 when nothing converged
    double full_connectivity_rate = 0.0;  // final largest fraction == 1
    double stayed_connected_rate = 0.0;
    double disconnection_ratio = 0.0;  // mean percent of agents outside the largest block

    std::vector<ScenarioRow> rows;
    std::vector<SeriesPoint> series;  // max centroid distance per step
};

EvalReport evaluate(const Controller& c, const Dataset& data, const EvalParams& p,
                    const std::string& controller_desc, const std::string& dataset_path = "");

/// Recompute aggregates and the hold-last series from rows + per-scenario
/// distance series. Exposed so the aggregation math is testable in isolation.
void aggregate_rows(EvalReport& report, const std::vector<std::vector<double>>& dist_series);

/// Writes report.json (aggregates + series), scenarios.csv, series.csv.
void save_report(const EvalReport& r, const std::string& dir);

/// Reads back report.json; rows stay empty (they live in the CSV).
EvalReport load_report(const std::string& json_path);

struct CompareResult {
    std::string table;        // aligned text
    std::string table_csv;    // one row per (dataset, controller)
    std::string series_csv;   // dataset,controller,step,mean,stddev
    std::string grouped_csv;  // dataset,controller,disconnection_ratio,mean_convergence_steps
};

/// Reports are grouped by dataset hash; every group needs at least two
/// entries with identical eval parameters, and the convergence-steps ratio
/// is taken against the group's first report. Throws DataError when no
/// reports share a scenario set or parameters differ.
CompareResult compare_reports(const std::vector<EvalReport>& reports);

/// Run `fn(i)` for i in [0, count) on up to `jobs` threads. Any exception is
/// rethrown on the caller thread.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace swarmlab

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ebnsim/apps.hpp"
#include "ebnsim/hypervisor.hpp"
#include "ebnsim/metrics.hpp"
#include "ebnsim/netmodel.hpp"

namespace ebnsim::experiments {

struct RequestOutcome {
    hypervisor::RequestPlan plan;
    metrics::RequestSummary summary;
    std::vector<metrics::AttemptRecord> records;
    apps::AppOutputs outputs;
};

struct RunResult {
    std::string vgraph_json;
    std::string vgraph_csv;
    std::vector<RequestOutcome> requests;
    bool all_feasible = true;
};

// One full simulation of a topology config: virtual-graph estimation,
// routing + purification planning, admission, applications, metrics.
RunResult run_simulation(const netmodel::Topology& topo, std::uint64_t seed);

// attempts.csv, summary.csv, vgraph.json (+ teleport.csv / logical.csv when
// the applications produced shots).
void write_run_outputs(const RunResult& result, const std::string& dir);

struct ExperimentSpec {
    std::string template_name;  // F_T1, C_G, T_E, C_d, C_m, C_h, EC_P, CFO_H, custom
    std::string param;
    std::vector<double> values;
    bool log_scale = false;
    int repetitions = 3;
    std::uint64_t master_seed = 1;
    std::string out_dir = ".";
    std::string base_config_path;  // custom template only
    int jobs = 1;
};

std::vector<std::string> template_names();
// Spec prefilled with the template's default sweep grid.
ExperimentSpec default_spec(const std::string& template_name);
// TOML/JSON file with an [experiment] table overriding the defaults.
ExperimentSpec load_experiment_spec(const std::string& path);

struct SweepRow {
    double value = 0.0;
    std::string variant;
    double t_ms = 0.0, t_ms_err = 0.0;
    double capacity = 0.0, capacity_err = 0.0;  // aggregate over requests
    double fidelity = 0.0, fidelity_err = 0.0;
    double qber = 0.0, qber_err = 0.0;
    bool has_qber = false;
    double app_fidelity = 0.0, app_fidelity_err = 0.0;
    bool has_app_fidelity = false;
    int reps = 0;
    bool any_aborted = false;
    bool any_infeasible = false;
};

struct ExperimentResult {
    std::vector<SweepRow> rows;
    bool partial_failure = false;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);
// sweep.csv plus a gnuplot script for the template's headline metric.
void write_experiment_outputs(const ExperimentResult& result, const ExperimentSpec& spec);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);

}  // namespace ebnsim::experiments

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ebnsim/experiments.hpp"
#include "ebnsim/metrics.hpp"
#include "ebnsim/netmodel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;

// Precedence: --seed, then EBNSIM_SEED, then the config's [network] seed.
std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t cli_seed,
                           std::uint64_t config_seed) {
    if (seed_opt->count() > 0) return cli_seed;
    if (const char* env = std::getenv("EBNSIM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::runtime_error(std::string("EBNSIM_SEED is not an integer: '") + env + "'");
        }
    }
    return config_seed;
}

void print_preset(const ebnsim::netmodel::TechnologyPreset& t) {
    std::cout << t.name << ":\n"
              << "  one_qubit_gate_ns    " << t.one_qubit_gate_ns << "\n"
              << "  two_qubit_gate_ns    " << t.two_qubit_gate_ns << "\n"
              << "  measurement_ns       " << t.measurement_ns << "\n"
              << "  photon_conversion    " << t.photon_conversion << "\n"
              << "  gate_depolarization  " << t.gate_depolarization << "\n"
              << "  memory_t1_ns         " << t.memory_t1_ns << "\n"
              << "  memory_t2_ns         " << t.memory_t2_ns << "\n"
              << "  photon_wavelength_nm " << t.photon_wavelength_nm << "\n";
}

int cmd_run(const std::string& config, const CLI::Option* seed_opt, std::uint64_t cli_seed,
            const std::string& out_dir) {
    auto topo = ebnsim::netmodel::load_topology_file(config);
    std::uint64_t seed = resolve_seed(seed_opt, cli_seed, topo.defaults.seed);
    auto result = ebnsim::experiments::run_simulation(topo, seed);
    ebnsim::experiments::write_run_outputs(result, out_dir);

    bool partial = !result.all_feasible;
    std::cout << "network '" << topo.defaults.name << "', seed " << seed << ", "
              << result.requests.size() << " request(s) -> " << out_dir << "\n";
    for (const auto& req : result.requests) {
        std::cout << "  " << req.summary.request_id << ": ";
        if (!req.plan.feasible) {
            std::cout << "infeasible (" << req.plan.reason << ")\n";
            continue;
        }
        if (req.summary.aborted) partial = true;
        std::cout << req.summary.successes << "/" << req.summary.attempts << " attempts, C="
                  << ebnsim::metrics::format_double(req.summary.capacity_eprs_per_s)
                  << " EPR/s";
        if (req.summary.successes > 0)
            std::cout << ", F=" << ebnsim::metrics::format_double(req.summary.fidelity_mean);
        if (req.summary.aborted) std::cout << " (aborted)";
        std::cout << "\n";
    }
    return partial ? kExitPartial : kExitOk;
}

int cmd_experiment(const std::string& what, const CLI::Option* seed_opt, std::uint64_t cli_seed,
                   const CLI::Option* out_opt, const std::string& out_dir,
                   const CLI::Option* jobs_opt, int jobs, const CLI::Option* reps_opt, int reps) {
    ebnsim::experiments::ExperimentSpec spec;
    auto names = ebnsim::experiments::template_names();
    if (std::find(names.begin(), names.end(), what) != names.end())
        spec = ebnsim::experiments::default_spec(what);
    else
        spec = ebnsim::experiments::load_experiment_spec(what);
    spec.master_seed = resolve_seed(seed_opt, cli_seed, spec.master_seed);
    if (out_opt->count() > 0) spec.out_dir = out_dir;
    if (jobs_opt->count() > 0) spec.jobs = jobs;
    if (reps_opt->count() > 0) spec.repetitions = reps;

    auto result = ebnsim::experiments::run_experiment(spec);
    ebnsim::experiments::write_experiment_outputs(result, spec);
    std::cout << spec.template_name << ": " << result.rows.size() << " sweep row(s) -> "
              << spec.out_dir << "/sweep.csv\n";
    if (result.partial_failure) {
        std::cerr << "warning: some sweep points aborted or were infeasible\n";
        return kExitPartial;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete-event simulator for entanglement-based quantum networks"};
    app.require_subcommand(1);

    std::string config, out_dir = "ebnsim_out", experiment_what;
    std::uint64_t cli_seed = 0;
    int jobs = 1, reps = 1;

    auto* run = app.add_subcommand("run", "simulate one topology config");
    run->add_option("config", config, "TOML or JSON topology config")->required();
    auto* run_seed = run->add_option("--seed", cli_seed, "master seed");
    run->add_option("--out", out_dir, "output directory")->capture_default_str();

    auto* exp = app.add_subcommand("experiment", "run a sweep template or experiment spec file");
    exp->add_option("template", experiment_what, "template name or spec file")->required();
    auto* exp_seed = exp->add_option("--seed", cli_seed, "master seed");
    auto* exp_out = exp->add_option("--out", out_dir, "output directory");
    auto* exp_jobs = exp->add_option("--jobs", jobs, "worker threads");
    auto* exp_reps = exp->add_option("--reps", reps, "repetitions per sweep point");

    auto* validate = app.add_subcommand("validate", "check a topology config");
    validate->add_option("config", config, "TOML or JSON topology config")->required();

    auto* presets = app.add_subcommand("presets", "list the built-in technology presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (run->parsed()) return cmd_run(config, run_seed, cli_seed, out_dir);
        if (exp->parsed())
            return cmd_experiment(experiment_what, exp_seed, cli_seed, exp_out, out_dir, exp_jobs,
                                  jobs, exp_reps, reps);
        if (validate->parsed()) {
            auto topo = ebnsim::netmodel::load_topology_file(config);
            std::cout << "OK: '" << topo.defaults.name << "': " << topo.nodes.size()
                      << " node(s), " << topo.links.size() << " link(s), "
                      << topo.requests.size() << " request(s)\n";
            return kExitOk;
        }
        if (presets->parsed()) {
            print_preset(ebnsim::netmodel::nv_preset());
            print_preset(ebnsim::netmodel::siv_preset());
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

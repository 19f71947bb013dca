#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ebnsim/experiments.hpp"
#include "ebnsim/rng.hpp"

using namespace ebnsim;
namespace fs = std::filesystem;

namespace {

netmodel::Topology small_topology(double persistence_ms = 1.0) {
    netmodel::LinkSpec link;
    link.coupling = 0.8;
    link.alpha_db_km = 0.0;
    auto topo = netmodel::make_chain(0, 2.0, netmodel::TechnologyPreset{}, link,
                                     qstate::NoiseChannel::none());
    topo.defaults.estimation_trials = 100;
    netmodel::RequestSpec req;
    req.id = "q";
    req.s = "s";
    req.d = "d";
    req.app = "capacity";
    req.purify = "off";
    req.persistence_ms = persistence_ms;
    topo.requests.push_back(req);
    return topo;
}

std::string attempts_text(const experiments::RunResult& r) {
    std::string out;
    for (const auto& req : r.requests)
        for (const auto& rec : req.records) out += metrics::attempts_csv_row(rec) + "\n";
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("template registry and default specs") {
    auto names = experiments::template_names();
    for (const char* expected :
         {"F_T1", "C_G", "T_E", "C_d", "C_m", "C_h", "EC_P", "CFO_H", "custom"})
        CHECK(std::find(names.begin(), names.end(), expected) != names.end());

    auto ft1 = experiments::default_spec("F_T1");
    CHECK(ft1.param == "t1_ns");
    CHECK(ft1.log_scale);
    CHECK(ft1.values.front() == doctest::Approx(1e2));
    CHECK(ft1.values.back() == doctest::Approx(1e9));

    auto te = experiments::default_spec("T_E");
    CHECK(te.values.size() == 10);
    CHECK_FALSE(te.log_scale);

    CHECK_THROWS_AS((void)experiments::default_spec("nope"), std::invalid_argument);
}

TEST_CASE("run_simulation is reproducible per seed") {
    auto topo = small_topology();
    auto r1 = experiments::run_simulation(topo, 7);
    auto r2 = experiments::run_simulation(topo, 7);
    REQUIRE(r1.requests.size() == 1);
    CHECK(r1.all_feasible);
    CHECK(r1.requests[0].summary.successes > 20);
    CHECK(r1.vgraph_json == r2.vgraph_json);
    CHECK(attempts_text(r1) == attempts_text(r2));
    CHECK(metrics::summary_csv_row(r1.requests[0].summary) ==
          metrics::summary_csv_row(r2.requests[0].summary));

    auto r3 = experiments::run_simulation(topo, 8);
    CHECK(attempts_text(r1) != attempts_text(r3));
}

TEST_CASE("write_run_outputs emits the fixed csv files") {
    auto dir = scratch_dir("ebnsim_run_out");
    auto result = experiments::run_simulation(small_topology(), 3);
    experiments::write_run_outputs(result, dir.string());

    CHECK(fs::exists(dir / "vgraph.json"));
    CHECK(fs::exists(dir / "summary.csv"));
    auto attempts = slurp(dir / "attempts.csv");
    CHECK(attempts.rfind(metrics::attempts_csv_header() + "\n", 0) == 0);
    // capacity app: no teleport shots
    CHECK_FALSE(fs::exists(dir / "teleport.csv"));
    CHECK_FALSE(fs::exists(dir / "logical.csv"));

    auto summary = slurp(dir / "summary.csv");
    CHECK(summary.rfind(metrics::summary_csv_header() + "\n", 0) == 0);
    CHECK(summary.find("q,") != std::string::npos);
}

TEST_CASE("custom experiment with one point matches a single run") {
    auto dir = scratch_dir("ebnsim_custom");
    fs::path cfg = dir / "net.toml";
    {
        std::ofstream out(cfg);
        out << "[network]\nseed = 1\nestimation_trials = 100\n"
            << "[chain]\nswitches = 0\ne2e_km = 2.0\ncoupling = 0.8\nalpha_db_km = 0.0\n"
            << "memory_noise = \"none\"\n"
            << "[[request]]\ns = \"s\"\nd = \"d\"\npersistence_ms = 1.0\npurify = \"off\"\n";
    }

    auto spec = experiments::default_spec("custom");
    spec.base_config_path = cfg.string();
    spec.master_seed = 5;
    spec.out_dir = (dir / "out").string();
    auto result = experiments::run_experiment(spec);
    REQUIRE(result.rows.size() == 1);
    CHECK_FALSE(result.partial_failure);

    std::uint64_t seed =
        derive_seed(5, "custom/index=" + metrics::format_double(0.0) + "/custom/rep=0");
    auto direct = experiments::run_simulation(netmodel::load_topology_file(cfg.string()), seed);
    REQUIRE(direct.requests.size() == 1);
    CHECK(result.rows[0].capacity ==
          doctest::Approx(direct.requests[0].summary.capacity_eprs_per_s).epsilon(1e-12));
    CHECK(result.rows[0].t_ms ==
          doctest::Approx(direct.requests[0].summary.overhead_ms).epsilon(1e-12));
}

TEST_CASE("sweep rows do not depend on value order or worker count") {
    auto spec = experiments::default_spec("T_E");
    spec.values = {0.2, 0.8};
    spec.repetitions = 1;
    spec.master_seed = 11;
    spec.jobs = 2;
    auto forward = experiments::run_experiment(spec);

    spec.values = {0.8, 0.2};
    spec.jobs = 1;
    auto reversed = experiments::run_experiment(spec);

    REQUIRE(forward.rows.size() == 2);
    REQUIRE(reversed.rows.size() == 2);
    CHECK(experiments::sweep_csv_row(forward.rows[0]) ==
          experiments::sweep_csv_row(reversed.rows[1]));
    CHECK(experiments::sweep_csv_row(forward.rows[1]) ==
          experiments::sweep_csv_row(reversed.rows[0]));
    // loss p = 0.8 should take roughly 4x longer per pair than p = 0.2
    CHECK(forward.rows[1].t_ms > 2.0 * forward.rows[0].t_ms);
}

TEST_CASE("experiment outputs include sweep.csv and a plot script") {
    auto dir = scratch_dir("ebnsim_sweep");
    auto spec = experiments::default_spec("T_E");
    spec.values = {0.5};
    spec.repetitions = 1;
    spec.out_dir = dir.string();
    auto result = experiments::run_experiment(spec);
    experiments::write_experiment_outputs(result, spec);

    auto csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind(experiments::sweep_csv_header() + "\n", 0) == 0);
    CHECK(csv.find(",direct,") != std::string::npos);
    auto gp = slurp(dir / "plot.gp");
    CHECK(gp.find("plot ") != std::string::npos);
    CHECK(gp.find("sweep.csv") != std::string::npos);
}

TEST_CASE("load_experiment_spec applies overrides on the template defaults") {
    auto dir = scratch_dir("ebnsim_spec");
    fs::path path = dir / "exp.toml";
    {
        std::ofstream out(path);
        out << "[experiment]\ntemplate = \"T_E\"\nvalues = [0.5]\nrepetitions = 2\n"
            << "seed = 9\nout = \"somewhere\"\njobs = 3\n";
    }
    auto spec = experiments::load_experiment_spec(path.string());
    CHECK(spec.template_name == "T_E");
    CHECK(spec.param == "p_loss");
    REQUIRE(spec.values.size() == 1);
    CHECK(spec.values[0] == doctest::Approx(0.5));
    CHECK(spec.repetitions == 2);
    CHECK(spec.master_seed == 9);
    CHECK(spec.out_dir == "somewhere");
    CHECK(spec.jobs == 3);

    CHECK_THROWS(experiments::load_experiment_spec((dir / "missing.toml").string()));
}

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ebnsim/apps.hpp"
#include "ebnsim/experiments.hpp"
#include "ebnsim/hypervisor.hpp"
#include "ebnsim/metrics.hpp"
#include "ebnsim/netmodel.hpp"
#include "ebnsim/qstate.hpp"
#include "ebnsim/rng.hpp"

namespace py = pybind11;
using namespace ebnsim;

namespace {

qstate::Qubit parse_qubit(const std::string& q) {
    if (q == "A" || q == "a") return qstate::Qubit::A;
    if (q == "B" || q == "b") return qstate::Qubit::B;
    throw std::invalid_argument("qubit must be 'A' or 'B'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "discrete-event simulator for entanglement-based quantum networks";

    // ------------------------------------------------------------- rng
    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def(py::init([](std::uint64_t master, const std::string& path) {
                 return RngStream(master, path);
             }),
             py::arg("master_seed"), py::arg("path"))
        .def("uniform", &RngStream::uniform)
        .def("normal", &RngStream::normal)
        .def("integer", &RngStream::integer, py::arg("n"))
        .def("bernoulli", &RngStream::bernoulli, py::arg("p"));
    m.def("derive_seed", [](std::uint64_t master, const std::string& path) {
        return derive_seed(master, path);
    });

    // ----------------------------------------------------------- qstate
    py::class_<qstate::PairState>(m, "PairState")
        .def_readwrite("rho", &qstate::PairState::rho)
        .def_readwrite("created_at", &qstate::PairState::created_at)
        .def_static("phi_plus", &qstate::PairState::phi_plus, py::arg("t") = 0)
        .def_static("werner", &qstate::PairState::werner, py::arg("fidelity"), py::arg("t") = 0)
        .def_static("bell_diag", &qstate::PairState::bell_diag, py::arg("p"), py::arg("t") = 0)
        .def("fidelity", [](const qstate::PairState& st) { return fidelity_to_phi_plus(st); });

    py::class_<qstate::NoiseChannel>(m, "NoiseChannel")
        .def_static("none", &qstate::NoiseChannel::none)
        .def_static("dephasing", &qstate::NoiseChannel::dephasing, py::arg("rate_hz"))
        .def_static("depolarizing", &qstate::NoiseChannel::depolarizing, py::arg("rate_hz"))
        .def_static("t1t2", &qstate::NoiseChannel::t1t2, py::arg("t1_ns"), py::arg("t2_ns"))
        .def_static("dephase_prob", &qstate::NoiseChannel::dephase_prob, py::arg("p"))
        .def_static("depolarize_prob", &qstate::NoiseChannel::depolarize_prob, py::arg("p"));

    m.def("fidelity_to_phi_plus",
          py::overload_cast<const qstate::Mat4&>(&qstate::fidelity_to_phi_plus), py::arg("rho"));
    m.def("bell_diagonal", &qstate::bell_diagonal, py::arg("rho"),
          "Diagonal in the Bell basis, order (Phi+, Phi-, Psi+, Psi-).");
    m.def(
        "apply_noise",
        [](const qstate::Mat4& rho, const std::string& qubit, const qstate::NoiseChannel& ch,
           double dt_ns) { return qstate::apply_noise_rho(rho, parse_qubit(qubit), ch, dt_ns); },
        py::arg("rho"), py::arg("qubit"), py::arg("channel"), py::arg("dt_ns"));

    m.def(
        "swap_branches",
        [](const qstate::Mat4& ab, const qstate::Mat4& bc) {
            std::vector<std::pair<double, qstate::Mat4>> out;
            for (const auto& br : qstate::swap_branches(ab, bc))
                out.emplace_back(br.prob, br.rho);
            return out;
        },
        py::arg("ab"), py::arg("bc"),
        "Bell-measurement branches (prob, uncorrected outer pair) for outcomes 0..3.");
    m.def(
        "apply_correction",
        [](const qstate::Mat4& rho, int outcome) {
            return qstate::apply_correction(rho, outcome, qstate::Qubit::B);
        },
        py::arg("rho"), py::arg("outcome"),
        "Pauli correction for a swap outcome at the destination-side qubit.");

    py::class_<qstate::DejmpsMap>(m, "DejmpsMap")
        .def_readonly("success_prob", &qstate::DejmpsMap::success_prob)
        .def_readonly("kept", &qstate::DejmpsMap::kept);
    m.def("dejmps_map", &qstate::dejmps_map, py::arg("pair1"), py::arg("pair2"));

    m.def("teleport_choi", &qstate::teleport_choi, py::arg("pair"));
    m.def("choi_apply", &qstate::choi_apply, py::arg("choi"), py::arg("rho_in"));
    m.def("pauli_twirl", &qstate::pauli_twirl, py::arg("choi"));
    m.def(
        "qber_sample",
        [](const qstate::PairState& st, RngStream& rng) { return qstate::qber_sample(st, rng); },
        py::arg("pair"), py::arg("rng"));

    m.def(
        "shor_decode",
        [](const std::array<int, 9>& labels) {
            auto out = apps::shor_decode(labels);
            return py::make_tuple(out.logical, out.labels);
        },
        py::arg("labels"),
        "Decode nine Pauli labels; returns (residual logical Pauli, label string).");

    // ---------------------------------------------------------- network
    py::class_<netmodel::Topology>(m, "Topology")
        .def_property_readonly("name",
                               [](const netmodel::Topology& t) { return t.defaults.name; })
        .def_property_readonly("seed",
                               [](const netmodel::Topology& t) { return t.defaults.seed; })
        .def_property_readonly("node_ids",
                               [](const netmodel::Topology& t) {
                                   std::vector<std::string> ids;
                                   for (const auto& n : t.nodes) ids.push_back(n.id);
                                   return ids;
                               })
        .def_property_readonly("request_ids",
                               [](const netmodel::Topology& t) {
                                   std::vector<std::string> ids;
                                   for (const auto& r : t.requests) ids.push_back(r.id);
                                   return ids;
                               })
        .def_property_readonly("link_count",
                               [](const netmodel::Topology& t) { return t.links.size(); })
        .def("validate", &netmodel::Topology::validate);
    m.def("load_topology", &netmodel::load_topology, py::arg("text"),
          "Parse a TOML or JSON topology document.");
    m.def("load_topology_file", &netmodel::load_topology_file, py::arg("path"));

    // ---------------------------------------------------------- metrics
    py::class_<metrics::AttemptRecord>(m, "AttemptRecord")
        .def_readonly("request_id", &metrics::AttemptRecord::request_id)
        .def_readonly("attempt", &metrics::AttemptRecord::attempt)
        .def_readonly("success", &metrics::AttemptRecord::success)
        .def_readonly("t_e_ns", &metrics::AttemptRecord::t_e_ns)
        .def_readonly("t_s_ns", &metrics::AttemptRecord::t_s_ns)
        .def_readonly("t_c_ns", &metrics::AttemptRecord::t_c_ns)
        .def_readonly("t_p_ns", &metrics::AttemptRecord::t_p_ns)
        .def_readonly("t_total_ns", &metrics::AttemptRecord::t_total_ns)
        .def_readonly("fidelity", &metrics::AttemptRecord::fidelity)
        .def_readonly("bit_s", &metrics::AttemptRecord::bit_s)
        .def_readonly("bit_d", &metrics::AttemptRecord::bit_d);

    py::class_<metrics::RequestSummary>(m, "RequestSummary")
        .def_readonly("request_id", &metrics::RequestSummary::request_id)
        .def_readonly("overhead_ms", &metrics::RequestSummary::overhead_ms)
        .def_readonly("capacity_eprs_per_s", &metrics::RequestSummary::capacity_eprs_per_s)
        .def_readonly("fidelity_mean", &metrics::RequestSummary::fidelity_mean)
        .def_readonly("fidelity_stderr", &metrics::RequestSummary::fidelity_stderr)
        .def_readonly("qber", &metrics::RequestSummary::qber)
        .def_readonly("has_qber", &metrics::RequestSummary::has_qber)
        .def_readonly("attempts", &metrics::RequestSummary::attempts)
        .def_readonly("successes", &metrics::RequestSummary::successes)
        .def_readonly("aborted", &metrics::RequestSummary::aborted);

    // ------------------------------------------------------- simulation
    py::class_<experiments::RequestOutcome>(m, "RequestOutcome")
        .def_readonly("summary", &experiments::RequestOutcome::summary)
        .def_readonly("records", &experiments::RequestOutcome::records)
        .def_property_readonly("feasible",
                               [](const experiments::RequestOutcome& o) {
                                   return o.plan.feasible;
                               });

    py::class_<experiments::RunResult>(m, "RunResult")
        .def_readonly("vgraph_json", &experiments::RunResult::vgraph_json)
        .def_readonly("requests", &experiments::RunResult::requests)
        .def_readonly("all_feasible", &experiments::RunResult::all_feasible);

    m.def("run_simulation", &experiments::run_simulation, py::arg("topology"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());
    m.def("write_run_outputs", &experiments::write_run_outputs, py::arg("result"),
          py::arg("directory"));

    // ------------------------------------------------------ experiments
    py::class_<experiments::ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("template_name", &experiments::ExperimentSpec::template_name)
        .def_readwrite("param", &experiments::ExperimentSpec::param)
        .def_readwrite("values", &experiments::ExperimentSpec::values)
        .def_readwrite("log_scale", &experiments::ExperimentSpec::log_scale)
        .def_readwrite("repetitions", &experiments::ExperimentSpec::repetitions)
        .def_readwrite("master_seed", &experiments::ExperimentSpec::master_seed)
        .def_readwrite("out_dir", &experiments::ExperimentSpec::out_dir)
        .def_readwrite("base_config_path", &experiments::ExperimentSpec::base_config_path)
        .def_readwrite("jobs", &experiments::ExperimentSpec::jobs);

    py::class_<experiments::SweepRow>(m, "SweepRow")
        .def_readonly("value", &experiments::SweepRow::value)
        .def_readonly("variant", &experiments::SweepRow::variant)
        .def_readonly("t_ms", &experiments::SweepRow::t_ms)
        .def_readonly("t_ms_err", &experiments::SweepRow::t_ms_err)
        .def_readonly("capacity", &experiments::SweepRow::capacity)
        .def_readonly("capacity_err", &experiments::SweepRow::capacity_err)
        .def_readonly("fidelity", &experiments::SweepRow::fidelity)
        .def_readonly("fidelity_err", &experiments::SweepRow::fidelity_err)
        .def_readonly("qber", &experiments::SweepRow::qber)
        .def_readonly("has_qber", &experiments::SweepRow::has_qber)
        .def_readonly("app_fidelity", &experiments::SweepRow::app_fidelity)
        .def_readonly("has_app_fidelity", &experiments::SweepRow::has_app_fidelity)
        .def_readonly("reps", &experiments::SweepRow::reps)
        .def_readonly("any_aborted", &experiments::SweepRow::any_aborted)
        .def_readonly("any_infeasible", &experiments::SweepRow::any_infeasible);

    py::class_<experiments::ExperimentResult>(m, "ExperimentResult")
        .def_readonly("rows", &experiments::ExperimentResult::rows)
        .def_readonly("partial_failure", &experiments::ExperimentResult::partial_failure);

    m.def("template_names", &experiments::template_names);
    m.def("default_spec", &experiments::default_spec, py::arg("template_name"));
    m.def("load_experiment_spec", &experiments::load_experiment_spec, py::arg("path"));
    m.def("run_experiment", &experiments::run_experiment, py::arg("spec"),
          py::call_guard<py::gil_scoped_release>());
    m.def("write_experiment_outputs", &experiments::write_experiment_outputs, py::arg("result"),
          py::arg("spec"));
    m.def("sweep_csv_header", &experiments::sweep_csv_header);
    m.def("sweep_csv_row", &experiments::sweep_csv_row, py::arg("row"));
}

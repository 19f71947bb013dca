#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ebnsim/qstate.hpp"

namespace ebnsim::netmodel {

// Fibre signal speed 2e8 m/s -> 5000 ns per km, shared by quantum and
// classical channels.
constexpr double kNsPerKm = 5000.0;
constexpr double kDefaultAlphaDbKm = 0.2;

struct TechnologyPreset {
    std::string name = "custom";
    double one_qubit_gate_ns = 10.0;
    double two_qubit_gate_ns = 500.0;
    double measurement_ns = 2000.0;
    double photon_conversion = 1.0;
    double gate_depolarization = 0.0;
    double memory_t1_ns = 1e7;
    double memory_t2_ns = 1e7;
    // Listed as a technology attribute but not consumed by any formula.
    double photon_wavelength_nm = 0.0;
};

TechnologyPreset nv_preset();
TechnologyPreset siv_preset();
std::optional<TechnologyPreset> preset_by_name(const std::string& name);

struct NodeSpec {
    enum class Kind { Switch, End };
    std::string id;
    Kind kind = Kind::End;
    int memories = 2;
    TechnologyPreset tech;
    qstate::NoiseChannel memory_noise;  // applied lazily per stored qubit
};

struct LinkSpec {
    std::string u, v;  // EPR source colocated with u
    double length_km = 0.0;
    double alpha_db_km = kDefaultAlphaDbKm;
    double coupling = 1.0;
    double f_src = 1.0;
    double d_pmd_ps_sqrt_km = 0.0;
    double tau_c_ps = 1.0;
    double source_period_ns = 1000.0;

    double delay_ns_exact() const { return length_km * kNsPerKm; }
    std::int64_t delay_ns() const { return static_cast<std::int64_t>(std::llround(delay_ns_exact())); }
};

struct RequestSpec {
    std::string id;
    std::string s, d;
    double f_min = 0.0;
    double deadline_ms = std::numeric_limits<double>::infinity();  // l
    double persistence_ms = 10.0;                                  // delta
    std::string app = "capacity";  // capacity | teleport | teleport_demand | teleport_shor
    double rate_hz = 0.0;
    std::string buffer_policy = "fifo";  // fifo | lifo
    int buffer_size = 10;
    std::string input_state = "haar";  // 0 | 1 | + | i+ | haar
    bool parallel_paths = false;
    bool sample_qber = false;
    std::string purify = "planned";  // planned | off | adaptive
    double purify_threshold = 0.95;
    int purify_cap = 5;

    std::int64_t deadline_ns() const {
        if (!std::isfinite(deadline_ms)) return std::numeric_limits<std::int64_t>::max();
        return static_cast<std::int64_t>(std::llround(deadline_ms * 1e6));
    }
    std::int64_t persistence_ns() const {
        if (!std::isfinite(persistence_ms)) return std::numeric_limits<std::int64_t>::max();
        return static_cast<std::int64_t>(std::llround(persistence_ms * 1e6));
    }
};

struct NetworkDefaults {
    std::uint64_t seed = 1;
    int estimation_trials = 1000;
    double source_period_ns = 1000.0;
    std::string name = "ebn";
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Topology {
    NetworkDefaults defaults;
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;
    std::vector<RequestSpec> requests;

    int node_index(const std::string& id) const;
    const NodeSpec& node(const std::string& id) const { return nodes[node_index(id)]; }
    // Either orientation; nullptr when the nodes are not adjacent.
    const LinkSpec* find_link(const std::string& a, const std::string& b) const;
    std::vector<std::vector<int>> adjacency() const;  // node index -> link indices
    void validate() const;
};

// Accepts TOML (see configs/demo.toml) or a JSON document with the same
// sections.
Topology load_topology(const std::string& text);
Topology load_topology_file(const std::string& path);

double attempt_success_probability(const LinkSpec& link, const TechnologyPreset& tech);
double channel_depolarization_probability(const LinkSpec& link);
// Werner(f_src) passed through the PMD depolarization of the channel.
qstate::PairState fresh_link_pair(const LinkSpec& link, std::int64_t now);

// Equal-spacing chain s - sw1 - ... - swH - d used by the experiment
// templates; link parameters are copied onto every hop.
Topology make_chain(int switches, double e2e_km, const TechnologyPreset& tech,
                    const LinkSpec& link_template, const qstate::NoiseChannel& memory_noise);

}  // namespace ebnsim::netmodel

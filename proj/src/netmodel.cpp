#include "ebnsim/netmodel.hpp"

#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ebnsim/tomlite.hpp"

namespace ebnsim::netmodel {

using nlohmann::json;

TechnologyPreset nv_preset() {
    TechnologyPreset t;
    t.name = "NV";
    t.one_qubit_gate_ns = 10.0;
    t.two_qubit_gate_ns = 500.0;
    t.measurement_ns = 2000.0;
    t.photon_conversion = 0.3;
    t.gate_depolarization = 0.001;
    t.memory_t1_ns = 1e7;
    t.memory_t2_ns = 1e7;
    t.photon_wavelength_nm = 637.0;
    return t;
}

TechnologyPreset siv_preset() {
    TechnologyPreset t;
    t.name = "SiV";
    t.one_qubit_gate_ns = 0.001;  // 1 ps; clocked at 1 ns, exact in noise math
    t.two_qubit_gate_ns = 100.0;
    t.measurement_ns = 1000.0;
    t.photon_conversion = 0.4;
    t.gate_depolarization = 0.001;
    t.memory_t1_ns = 1e7;
    t.memory_t2_ns = 1e7;
    t.photon_wavelength_nm = 737.0;
    return t;
}

std::optional<TechnologyPreset> preset_by_name(const std::string& name) {
    std::string low;
    for (char c : name) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "nv") return nv_preset();
    if (low == "siv") return siv_preset();
    if (low == "custom") return TechnologyPreset{};
    return std::nullopt;
}

int Topology::node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id) return static_cast<int>(i);
    throw ValidationError("unknown node id '" + id + "'");
}

const LinkSpec* Topology::find_link(const std::string& a, const std::string& b) const {
    for (const auto& l : links)
        if ((l.u == a && l.v == b) || (l.u == b && l.v == a)) return &l;
    return nullptr;
}

std::vector<std::vector<int>> Topology::adjacency() const {
    std::vector<std::vector<int>> adj(nodes.size());
    for (std::size_t li = 0; li < links.size(); ++li) {
        adj[node_index(links[li].u)].push_back(static_cast<int>(li));
        adj[node_index(links[li].v)].push_back(static_cast<int>(li));
    }
    return adj;
}

void Topology::validate() const {
    if (nodes.empty()) throw ValidationError("topology has no nodes");
    std::set<std::string> ids;
    for (const auto& n : nodes) {
        if (!ids.insert(n.id).second) throw ValidationError("duplicate node id '" + n.id + "'");
        if (n.kind == NodeSpec::Kind::End && n.memories != 2)
            throw ValidationError("end node '" + n.id + "' must have exactly 2 memory positions");
        if (n.tech.one_qubit_gate_ns <= 0 || n.tech.two_qubit_gate_ns <= 0 ||
            n.tech.measurement_ns <= 0)
            throw ValidationError("node '" + n.id + "': instruction durations must be positive");
    }
    std::vector<int> degree(nodes.size(), 0);
    for (const auto& l : links) {
        if (l.length_km < 0) throw ValidationError("link " + l.u + "-" + l.v + ": negative length");
        if (l.alpha_db_km < 0) throw ValidationError("link " + l.u + "-" + l.v + ": negative attenuation");
        if (l.coupling < 0 || l.coupling > 1)
            throw ValidationError("link " + l.u + "-" + l.v + ": coupling outside [0,1]");
        if (l.f_src < 0.25 || l.f_src > 1)
            throw ValidationError("link " + l.u + "-" + l.v + ": source fidelity outside [0.25,1]");
        ++degree[node_index(l.u)];
        ++degree[node_index(l.v)];
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.kind == NodeSpec::Kind::Switch && n.memories < degree[i])
            throw ValidationError("switch '" + n.id + "': memories < links (" +
                                  std::to_string(n.memories) + " < " + std::to_string(degree[i]) + ")");
    }
    // connectivity over the link graph
    if (!links.empty()) {
        std::vector<bool> seen(nodes.size(), false);
        std::queue<int> frontier;
        frontier.push(0);
        seen[0] = true;
        auto adj = adjacency();
        while (!frontier.empty()) {
            int v = frontier.front();
            frontier.pop();
            for (int li : adj[v]) {
                int other = node_index(links[li].u) == v ? node_index(links[li].v) : node_index(links[li].u);
                if (!seen[other]) {
                    seen[other] = true;
                    frontier.push(other);
                }
            }
        }
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (!seen[i]) throw ValidationError("node '" + nodes[i].id + "' is disconnected");
    }
    for (const auto& r : requests) {
        if (r.s == r.d) throw ValidationError("request '" + r.id + "': s == d");
        node_index(r.s);
        node_index(r.d);
        if (r.f_min < 0 || r.f_min > 1)
            throw ValidationError("request '" + r.id + "': f_min outside [0,1]");
        if (!(r.deadline_ms > 0)) throw ValidationError("request '" + r.id + "': deadline must be > 0");
        if (!(r.persistence_ms > 0))
            throw ValidationError("request '" + r.id + "': persistence must be > 0");
    }
}

namespace {

qstate::NoiseChannel parse_memory_noise(const json& j, const TechnologyPreset& tech) {
    std::string kind = j.value("memory_noise", "t1t2");
    if (kind == "none") return qstate::NoiseChannel::none();
    if (kind == "dephasing") return qstate::NoiseChannel::dephasing(j.value("memory_rate_hz", 0.0));
    if (kind == "depolarizing")
        return qstate::NoiseChannel::depolarizing(j.value("memory_rate_hz", 0.0));
    if (kind == "t1t2")
        return qstate::NoiseChannel::t1t2(j.value("memory_t1_ns", tech.memory_t1_ns),
                                          j.value("memory_t2_ns", tech.memory_t2_ns));
    throw ValidationError("unknown memory_noise kind '" + kind + "'");
}

TechnologyPreset parse_tech(const json& j) {
    TechnologyPreset t;
    if (j.contains("tech")) {
        auto p = preset_by_name(j["tech"].get<std::string>());
        if (!p) throw ValidationError("unknown technology preset '" + j["tech"].get<std::string>() + "'");
        t = *p;
    }
    t.one_qubit_gate_ns = j.value("one_qubit_gate_ns", t.one_qubit_gate_ns);
    t.two_qubit_gate_ns = j.value("two_qubit_gate_ns", t.two_qubit_gate_ns);
    t.measurement_ns = j.value("measurement_ns", t.measurement_ns);
    t.photon_conversion = j.value("photon_conversion", t.photon_conversion);
    t.gate_depolarization = j.value("gate_depolarization", t.gate_depolarization);
    t.memory_t1_ns = j.value("memory_t1_ns", t.memory_t1_ns);
    t.memory_t2_ns = j.value("memory_t2_ns", t.memory_t2_ns);
    t.photon_wavelength_nm = j.value("photon_wavelength_nm", t.photon_wavelength_nm);
    return t;
}

NodeSpec parse_node(const json& j) {
    NodeSpec n;
    n.id = j.at("id").get<std::string>();
    std::string kind = j.value("kind", "end");
    if (kind == "switch")
        n.kind = NodeSpec::Kind::Switch;
    else if (kind == "end")
        n.kind = NodeSpec::Kind::End;
    else
        throw ValidationError("node '" + n.id + "': unknown kind '" + kind + "'");
    n.tech = parse_tech(j);
    n.memories = j.value("memories", n.kind == NodeSpec::Kind::End ? 2 : 4);
    n.memory_noise = parse_memory_noise(j, n.tech);
    return n;
}

LinkSpec parse_link(const json& j, const NetworkDefaults& defaults) {
    LinkSpec l;
    l.u = j.at("u").get<std::string>();
    l.v = j.at("v").get<std::string>();
    l.length_km = j.value("length_km", 0.0);
    l.alpha_db_km = j.value("alpha_db_km", kDefaultAlphaDbKm);
    l.coupling = j.value("coupling", 1.0);
    l.f_src = j.value("f_src", 1.0);
    l.d_pmd_ps_sqrt_km = j.value("d_pmd", 0.0);
    l.tau_c_ps = j.value("tau_c", 1.0);
    l.source_period_ns = j.value("source_period_ns", defaults.source_period_ns);
    return l;
}

RequestSpec parse_request(const json& j, std::size_t index) {
    RequestSpec r;
    r.id = j.value("id", "r" + std::to_string(index));
    r.s = j.at("s").get<std::string>();
    r.d = j.at("d").get<std::string>();
    r.f_min = j.value("f_min", 0.0);
    r.deadline_ms = j.value("deadline_ms", std::numeric_limits<double>::infinity());
    r.persistence_ms = j.value("persistence_ms", 10.0);
    r.app = j.value("app", "capacity");
    r.rate_hz = j.value("rate_hz", 0.0);
    r.buffer_policy = j.value("buffer_policy", "fifo");
    r.buffer_size = j.value("buffer_size", 10);
    r.input_state = j.value("input_state", "haar");
    r.parallel_paths = j.value("parallel_paths", false);
    r.sample_qber = j.value("sample_qber", false);
    r.purify = j.value("purify", "planned");
    r.purify_threshold = j.value("purify_threshold", 0.95);
    r.purify_cap = j.value("purify_cap", 5);
    return r;
}

}  // namespace

Topology load_topology(const std::string& text) {
    json doc;
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            doc = json::parse(text);
        } catch (const json::exception& e) {
            throw ValidationError(std::string("JSON parse error: ") + e.what());
        }
    } else {
        doc = tomlite::parse(text);
    }

    Topology topo;
    if (doc.contains("network")) {
        const json& net = doc["network"];
        topo.defaults.seed = net.value("seed", 1ULL);
        topo.defaults.estimation_trials = net.value("estimation_trials", 1000);
        topo.defaults.source_period_ns = net.value("source_period_ns", 1000.0);
        topo.defaults.name = net.value("name", "ebn");
    }
    try {
        if (doc.contains("chain")) {
            const json& c = doc["chain"];
            TechnologyPreset tech = parse_tech(c);
            LinkSpec lt = parse_link(
                json{{"u", "s"},
                     {"v", "d"},
                     {"length_km", 0.0},
                     {"alpha_db_km", c.value("alpha_db_km", kDefaultAlphaDbKm)},
                     {"coupling", c.value("coupling", 1.0)},
                     {"f_src", c.value("f_src", 1.0)},
                     {"d_pmd", c.value("d_pmd", 0.0)},
                     {"tau_c", c.value("tau_c", 1.0)}},
                topo.defaults);
            lt.source_period_ns = c.value("source_period_ns", topo.defaults.source_period_ns);
            qstate::NoiseChannel mem = parse_memory_noise(c, tech);
            Topology chain = make_chain(c.value("switches", 1), c.at("e2e_km").get<double>(), tech,
                                        lt, mem);
            topo.nodes = chain.nodes;
            topo.links = chain.links;
        }
        if (doc.contains("node"))
            for (const auto& nj : doc["node"]) topo.nodes.push_back(parse_node(nj));
        if (doc.contains("link"))
            for (const auto& lj : doc["link"]) topo.links.push_back(parse_link(lj, topo.defaults));
        if (doc.contains("request")) {
            std::size_t i = 0;
            for (const auto& rj : doc["request"]) topo.requests.push_back(parse_request(rj, i++));
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config error: ") + e.what());
    }
    topo.validate();
    return topo;
}

Topology load_topology_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_topology(buf.str());
}

double attempt_success_probability(const LinkSpec& link, const TechnologyPreset& tech) {
    double transmission = std::pow(10.0, -link.alpha_db_km * link.length_km / 10.0);
    return link.coupling * tech.photon_conversion * transmission;
}

double channel_depolarization_probability(const LinkSpec& link) {
    if (link.d_pmd_ps_sqrt_km <= 0.0 || link.length_km <= 0.0) return 0.0;
    double tau_pmd = link.d_pmd_ps_sqrt_km * std::sqrt(link.length_km);
    double ratio = tau_pmd / link.tau_c_ps;
    double p = 1.0 - std::exp(-ratio * ratio);
    return std::clamp(p, 0.0, 1.0);
}

qstate::PairState fresh_link_pair(const LinkSpec& link, std::int64_t now) {
    qstate::PairState st = qstate::PairState::werner(link.f_src, now);
    double p_dep = channel_depolarization_probability(link);
    if (p_dep > 0.0) {
        // flying qubit is the B side (stored at v)
        st = qstate::apply_noise(st, qstate::Qubit::B, qstate::NoiseChannel::depolarize_prob(p_dep), 0.0);
    }
    return st;
}

Topology make_chain(int switches, double e2e_km, const TechnologyPreset& tech,
                    const LinkSpec& link_template, const qstate::NoiseChannel& memory_noise) {
    if (switches < 0) throw ValidationError("make_chain: negative switch count");
    Topology topo;
    auto add_node = [&](const std::string& id, NodeSpec::Kind kind, int memories) {
        NodeSpec n;
        n.id = id;
        n.kind = kind;
        n.memories = memories;
        n.tech = tech;
        n.memory_noise = memory_noise;
        topo.nodes.push_back(n);
    };
    add_node("s", NodeSpec::Kind::End, 2);
    for (int i = 1; i <= switches; ++i) add_node("sw" + std::to_string(i), NodeSpec::Kind::Switch, 2);
    add_node("d", NodeSpec::Kind::End, 2);

    double hop_km = e2e_km / (switches + 1);
    for (int i = 0; i <= switches; ++i) {
        LinkSpec l = link_template;
        l.u = topo.nodes[i].id;
        l.v = topo.nodes[i + 1].id;
        l.length_km = hop_km;
        topo.links.push_back(l);
    }
    return topo;
}

}  // namespace ebnsim::netmodel

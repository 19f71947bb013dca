#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ebnsim/netmodel.hpp"
#include "oracles.hpp"

using namespace ebnsim;
using namespace ebnsim::netmodel;

namespace {

const char* kToml = R"(
[network]
seed = 9
name = "demo"

[[node]]
id = "alice"
kind = "end"
tech = "nv"

[[node]]
id = "hub"
kind = "switch"
memories = 4
tech = "nv"
memory_noise = "dephasing"
memory_rate_hz = 200.0

[[node]]
id = "bob"
kind = "end"
tech = "siv"

[[link]]
u = "alice"
v = "hub"
length_km = 10.0
coupling = 0.8
f_src = 0.95

[[link]]
u = "hub"
v = "bob"
length_km = 12.5
alpha_db_km = 0.25
d_pmd = 0.5
tau_c = 2.0

[[request]]
id = "q1"
s = "alice"
d = "bob"
f_min = 0.6
deadline_ms = 5.0
persistence_ms = 2.0
sample_qber = true
)";

}  // namespace

TEST_CASE("toml config round-trips into a validated topology") {
    Topology t = load_topology(kToml);
    CHECK(t.defaults.seed == 9);
    CHECK(t.defaults.name == "demo");
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].kind == NodeSpec::Kind::End);
    CHECK(t.nodes[0].tech.photon_conversion == doctest::Approx(0.3));
    CHECK(t.nodes[1].memories == 4);
    CHECK(t.nodes[1].memory_noise.kind == qstate::NoiseChannel::Kind::Dephasing);
    CHECK(t.nodes[1].memory_noise.rate_hz == doctest::Approx(200.0));
    CHECK(t.nodes[2].tech.two_qubit_gate_ns == doctest::Approx(100.0));
    REQUIRE(t.links.size() == 2);
    CHECK(t.links[0].coupling == doctest::Approx(0.8));
    CHECK(t.links[1].alpha_db_km == doctest::Approx(0.25));
    CHECK(t.links[0].delay_ns() == 50000);
    REQUIRE(t.requests.size() == 1);
    CHECK(t.requests[0].deadline_ns() == 5000000);
    CHECK(t.requests[0].sample_qber);
    CHECK(t.find_link("bob", "hub") == &t.links[1]);
    CHECK(t.find_link("alice", "bob") == nullptr);
}

TEST_CASE("json configs parse to the same topology") {
    const char* js = R"({
      "network": {"seed": 9},
      "node": [
        {"id": "alice", "kind": "end"},
        {"id": "bob", "kind": "end"}
      ],
      "link": [{"u": "alice", "v": "bob", "length_km": 3.0}],
      "request": [{"s": "alice", "d": "bob"}]
    })";
    Topology t = load_topology(js);
    CHECK(t.nodes.size() == 2);
    CHECK(t.links[0].length_km == doctest::Approx(3.0));
    CHECK(t.requests[0].id == "r0");
    CHECK(t.requests[0].deadline_ns() == std::numeric_limits<std::int64_t>::max());
}

TEST_CASE("chain shorthand expands to an equal-spacing path") {
    const char* cfg = R"(
[chain]
switches = 3
e2e_km = 40.0
tech = "nv"
coupling = 0.9

[[request]]
s = "s"
d = "d"
)";
    Topology t = load_topology(cfg);
    REQUIRE(t.nodes.size() == 5);
    CHECK(t.nodes[1].id == "sw1");
    CHECK(t.nodes[1].kind == NodeSpec::Kind::Switch);
    REQUIRE(t.links.size() == 4);
    for (const auto& l : t.links) {
        CHECK(l.length_km == doctest::Approx(10.0));
        CHECK(l.coupling == doctest::Approx(0.9));
    }
}

TEST_CASE("validation rejects malformed topologies") {
    auto expect_reject = [](const std::string& cfg) {
        CHECK_THROWS_AS(load_topology(cfg), ValidationError);
    };
    // end node with wrong memory count
    expect_reject(R"(
[[node]]
id = "a"
kind = "end"
memories = 3
)");
    // switch with fewer memories than links
    expect_reject(R"(
[[node]]
id = "a"
kind = "end"
[[node]]
id = "b"
kind = "end"
[[node]]
id = "x"
kind = "switch"
memories = 1
[[link]]
u = "a"
v = "x"
[[link]]
u = "x"
v = "b"
)");
    // coupling out of range
    expect_reject(R"(
[[node]]
id = "a"
kind = "end"
[[node]]
id = "b"
kind = "end"
[[link]]
u = "a"
v = "b"
coupling = 1.5
)");
    // source fidelity below the entangled regime
    expect_reject(R"(
[[node]]
id = "a"
kind = "end"
[[node]]
id = "b"
kind = "end"
[[link]]
u = "a"
v = "b"
f_src = 0.2
)");
    // disconnected node
    expect_reject(R"(
[[node]]
id = "a"
kind = "end"
[[node]]
id = "b"
kind = "end"
[[node]]
id = "c"
kind = "end"
[[link]]
u = "a"
v = "b"
)");
    // s == d
    expect_reject(R"(
[[node]]
id = "a"
kind = "end"
[[node]]
id = "b"
kind = "end"
[[link]]
u = "a"
v = "b"
[[request]]
s = "a"
d = "a"
)");
    // unknown node in request
    expect_reject(R"(
[[node]]
id = "a"
kind = "end"
[[node]]
id = "b"
kind = "end"
[[link]]
u = "a"
v = "b"
[[request]]
s = "a"
d = "zz"
)");
}

TEST_CASE("link physics formulas match the closed forms") {
    LinkSpec l;
    l.u = "a";
    l.v = "b";
    l.length_km = 25.0;
    l.alpha_db_km = 0.2;
    l.coupling = 0.7;
    l.f_src = 0.92;
    l.d_pmd_ps_sqrt_km = 0.4;
    l.tau_c_ps = 1.5;
    TechnologyPreset tech = nv_preset();
    CHECK(attempt_success_probability(l, tech) ==
          doctest::Approx(oracles::link_success_probability(0.7, 0.3, 0.2, 25.0)).epsilon(1e-12));
    CHECK(channel_depolarization_probability(l) ==
          doctest::Approx(oracles::pmd_depolarization(0.4, 1.5, 25.0)).epsilon(1e-12));

    auto pair = fresh_link_pair(l, 0);
    double x = (4.0 * 0.92 - 1.0) / 3.0 * (1.0 - channel_depolarization_probability(l));
    CHECK(qstate::fidelity_to_phi_plus(pair) == doctest::Approx((3.0 * x + 1.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("presets carry the published instruction timings") {
    auto nv = nv_preset();
    CHECK(nv.one_qubit_gate_ns == doctest::Approx(10.0));
    CHECK(nv.two_qubit_gate_ns == doctest::Approx(500.0));
    CHECK(nv.measurement_ns == doctest::Approx(2000.0));
    auto siv = siv_preset();
    CHECK(siv.two_qubit_gate_ns == doctest::Approx(100.0));
    CHECK(siv.measurement_ns == doctest::Approx(1000.0));
    CHECK(preset_by_name("NV"));
    CHECK(preset_by_name("SiV"));
    CHECK_FALSE(preset_by_name("ions"));
}

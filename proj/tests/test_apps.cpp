#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "ebnsim/apps.hpp"
#include "oracles.hpp"

using namespace ebnsim;
using namespace ebnsim::apps;

namespace {

netmodel::Topology ideal_chain(int switches, double e2e_km, double coupling = 1.0,
                               double f_src = 1.0,
                               qstate::NoiseChannel mem = qstate::NoiseChannel::none()) {
    netmodel::TechnologyPreset tech;
    netmodel::LinkSpec lt;
    lt.alpha_db_km = 0.0;
    lt.coupling = coupling;
    lt.f_src = f_src;
    lt.source_period_ns = 1000.0;
    auto topo = netmodel::make_chain(switches, e2e_km, tech, lt, mem);
    topo.validate();
    return topo;
}

protocols::PathAssignment reserve_full_path(protocols::NetworkRuntime& net,
                                            const std::string& req) {
    protocols::PathAssignment pa;
    pa.request_id = req;
    int n = static_cast<int>(net.topo().nodes.size());
    for (int i = 0; i < n; ++i) pa.nodes.push_back(i);
    pa.reserved.resize(n);
    for (int i = 0; i < n; ++i) {
        auto& r = pa.reserved[i];
        if (i == 0) {
            r.toward_d = 0;
            r.aux = 1;
        } else if (i == n - 1) {
            r.toward_s = 0;
            r.aux = 1;
        } else {
            r.toward_s = 0;
            r.toward_d = 1;
        }
        for (int slot : {r.toward_s, r.toward_d, r.aux})
            if (slot >= 0) net.reserve(i, slot, req);
    }
    return pa;
}

struct AppRig {
    netmodel::Topology topo;
    Simulation sim;
    protocols::NetworkRuntime net;
    metrics::Collector coll;
    std::unique_ptr<AppRunner> app;
    bool completed = false;

    AppRig(netmodel::Topology t, std::uint64_t seed, netmodel::RequestSpec req)
        : topo(std::move(t)), sim(seed), net(sim, topo), coll("q", req.persistence_ms * 1e6) {
        req.id = "q";
        req.s = topo.nodes.front().id;
        req.d = topo.nodes.back().id;
        protocols::PathManager::Config cfg;
        cfg.path = reserve_full_path(net, "q");
        cfg.request = req;
        app = std::make_unique<AppRunner>(net, cfg, coll);
    }

    void go() {
        app->run([this]() { completed = true; });
        sim.run_until();
    }
};

}  // namespace

TEST_CASE("input states are pure and match their specs") {
    RngStream rng(3);
    auto z0 = input_state("0", rng);
    CHECK(std::real(z0(0, 0)) == doctest::Approx(1.0));
    auto plus = input_state("+", rng);
    CHECK(std::real(plus(0, 1)) == doctest::Approx(0.5));
    auto ip = input_state("i+", rng);
    CHECK(std::imag(ip(1, 0)) == doctest::Approx(0.5));
    for (int i = 0; i < 20; ++i) {
        auto h = input_state("haar", rng);
        CHECK(std::real(h.trace()) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::real((h * h).trace()) == doctest::Approx(1.0).epsilon(1e-12));  // pure
    }
    CHECK_THROWS(input_state("bogus", rng));
}

TEST_CASE("demand buffer policies drop and serve as documented") {
    DemandBuffer fifo(DemandBuffer::Policy::FIFO, 2);
    CHECK_FALSE(fifo.push({0, 10, {}}));
    CHECK_FALSE(fifo.push({1, 20, {}}));
    auto d = fifo.push({2, 30, {}});  // full: incoming dropped
    REQUIRE(d);
    CHECK(d->id == 2);
    CHECK(fifo.pop()->id == 0);  // FIFO serves oldest
    CHECK(fifo.arrivals() == 3);
    CHECK(fifo.drops() == 1);
    CHECK(fifo.size() == 1);

    DemandBuffer lifo(DemandBuffer::Policy::LIFO, 2);
    lifo.push({0, 10, {}});
    lifo.push({1, 20, {}});
    auto d2 = lifo.push({2, 30, {}});  // full: oldest dropped, fresh kept
    REQUIRE(d2);
    CHECK(d2->id == 0);
    CHECK(lifo.pop()->id == 2);  // LIFO serves newest
}

TEST_CASE("shor decoder corrects all 27 weight-1 errors exactly") {
    for (int pos = 0; pos < 9; ++pos)
        for (int k = 1; k < 4; ++k) {
            std::array<int, 9> labels{};
            labels[pos] = k;
            auto out = shor_decode(labels);
            CHECK(out.logical == 0);
        }
    std::array<int, 9> clean{};
    CHECK(shor_decode(clean).logical == 0);
    CHECK(shor_decode(clean).labels == "IIIIIIIII");
}

TEST_CASE("shor decoder fails exactly on the expected weight-2 patterns") {
    // exhaustive weight-2 oracle: X,X in one block -> logical Z;
    // odd-Z parity in two blocks -> logical X; mixed X/Z faults are independent
    for (int p1 = 0; p1 < 9; ++p1)
        for (int p2 = 0; p2 < 9; ++p2) {
            if (p1 == p2) continue;
            for (int k1 = 1; k1 < 4; ++k1)
                for (int k2 = 1; k2 < 4; ++k2) {
                    std::array<int, 9> labels{};
                    labels[p1] = k1;
                    labels[p2] = k2;
                    auto out = shor_decode(labels);
                    bool same_block = p1 / 3 == p2 / 3;
                    bool x1 = (k1 >> 1) & 1, x2 = (k2 >> 1) & 1;
                    bool z1 = k1 & 1, z2 = k2 & 1;
                    int expect_z = (same_block && x1 && x2) ? 1 : 0;
                    int expect_x = (!same_block && z1 && z2) ? 1 : 0;
                    CHECK(out.logical == ((expect_x << 1) | expect_z));
                }
        }
}

TEST_CASE("capacity app counts deliveries over the persistence window") {
    netmodel::RequestSpec req;
    req.app = "capacity";
    req.persistence_ms = 1.0;
    AppRig rig(ideal_chain(1, 20.0), 5, req);
    rig.go();
    CHECK(rig.completed);
    auto s = rig.coll.summarize();
    CHECK(s.successes > 0);
    CHECK(s.fidelity_mean == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(s.aborted);

    // halving delta roughly halves the deliveries
    netmodel::RequestSpec req2 = req;
    req2.persistence_ms = 0.5;
    AppRig rig2(ideal_chain(1, 20.0), 5, req2);
    rig2.go();
    double ratio = static_cast<double>(rig2.coll.summarize().successes) / s.successes;
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("free-running teleportation reproduces the channel fidelity") {
    netmodel::RequestSpec req;
    req.app = "teleport";
    req.persistence_ms = 1.0;
    req.input_state = "+";
    AppRig rig(ideal_chain(0, 10.0, 1.0, 0.9), 9, req);
    rig.go();
    REQUIRE(!rig.app->outputs().shots.empty());
    // Werner-0.9 channel on |+>: errors Z and Y (each (1-F)/3) are fatal
    for (const auto& s : rig.app->outputs().shots)
        CHECK(s.fidelity == doctest::Approx(1.0 - 2.0 * 0.1 / 3.0).epsilon(1e-9));

    // Haar-averaged fidelity equals (2 F_e + 1) / 3
    netmodel::RequestSpec req2 = req;
    req2.input_state = "haar";
    req2.persistence_ms = 20.0;
    AppRig rig2(ideal_chain(0, 10.0, 1.0, 0.9), 10, req2);
    rig2.go();
    const auto& shots = rig2.app->outputs().shots;
    REQUIRE(shots.size() > 100);
    double mean = 0;
    for (const auto& s : shots) mean += s.fidelity;
    mean /= static_cast<double>(shots.size());
    double expect = (2.0 * 0.9 + 1.0) / 3.0;
    CHECK(mean == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("demand overload fills the buffer and conserves arrivals") {
    auto run_policy = [](const std::string& policy) {
        netmodel::RequestSpec req;
        req.app = "teleport_demand";
        req.persistence_ms = 10.0;
        req.rate_hz = 40000.0;  // 2x the ~19.6k pairs/s the link can serve
        req.buffer_policy = policy;
        req.buffer_size = 5;
        req.input_state = "+";
        AppRig rig(ideal_chain(0, 10.0), 13, req);
        rig.go();
        return std::move(rig.app);
    };
    auto fifo = run_policy("fifo");
    const auto& out = fifo->outputs();
    CHECK(out.buffer_drops > 0);
    int delivered = 0;
    double fifo_wait = 0;
    for (const auto& s : out.shots)
        if (!s.dropped) {
            ++delivered;
            fifo_wait += static_cast<double>(s.wait_ns);
        }
    fifo_wait /= delivered;
    CHECK(out.buffer_arrivals == delivered + out.buffer_drops + out.buffer_residual);

    auto lifo = run_policy("lifo");
    int lifo_delivered = 0;
    double lifo_wait = 0;
    for (const auto& s : lifo->outputs().shots)
        if (!s.dropped) {
            ++lifo_delivered;
            lifo_wait += static_cast<double>(s.wait_ns);
        }
    lifo_wait /= lifo_delivered;
    CHECK(lifo_wait < fifo_wait);
}

TEST_CASE("low demand leaves the buffer empty with no drops") {
    netmodel::RequestSpec req;
    req.app = "teleport_demand";
    req.persistence_ms = 5.0;
    req.rate_hz = 1000.0;  // well under capacity
    req.input_state = "+";
    AppRig rig(ideal_chain(0, 10.0), 21, req);
    rig.go();
    const auto& out = rig.app->outputs();
    CHECK(out.buffer_drops == 0);
    CHECK(out.buffer_residual <= 1);
    CHECK(out.buffer_arrivals == static_cast<int>(out.shots.size()) + out.buffer_residual);
    for (const auto& s : out.shots) CHECK(s.fidelity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("logical teleportation under i.i.d. dephasing matches the code oracle") {
    // 10 km link, dephasing on the source memory during the 50 us flight
    double rate = 1e3;
    double pz = (1.0 - std::exp(-rate * 50000.0 * 1e-9)) / 2.0;
    netmodel::RequestSpec req;
    req.app = "teleport_shor";
    req.persistence_ms = 1000.0;
    req.parallel_paths = true;  // isolate the i.i.d. channel from buffering
    req.input_state = "haar";
    AppRig rig(ideal_chain(0, 10.0, 1.0, 1.0, qstate::NoiseChannel::dephasing(rate)), 29, req);
    rig.go();
    const auto& shots = rig.app->outputs().logical;
    REQUIRE(shots.size() >= 2000);
    double err = 0;
    for (const auto& s : shots) err += s.logical_error ? 1 : 0;
    err /= static_cast<double>(shots.size());
    // logical X error iff >= 2 blocks carry odd Z parity
    double q = 3 * pz * (1 - pz) * (1 - pz) + pz * pz * pz;
    double expect = 3 * q * q * (1 - q) + q * q * q;
    double sigma = std::sqrt(expect * (1 - expect) / static_cast<double>(shots.size()));
    CHECK(std::abs(err - expect) <= 3 * sigma + 1e-6);
    // and the logical error rate sits below the physical error rate
    CHECK(err < pz);
}

TEST_CASE("sequential pair buffering is worse than parallel paths") {
    double rate = 2e3;
    auto run_mode = [&](bool parallel, std::uint64_t seed) {
        netmodel::RequestSpec req;
        req.app = "teleport_shor";
        req.persistence_ms = 400.0;
        req.parallel_paths = parallel;
        req.input_state = "haar";
        AppRig rig(ideal_chain(0, 10.0, 1.0, 1.0, qstate::NoiseChannel::dephasing(rate)), seed,
                   req);
        rig.go();
        double err = 0;
        for (const auto& s : rig.app->outputs().logical) err += s.logical_error ? 1 : 0;
        return err / static_cast<double>(rig.app->outputs().logical.size());
    };
    CHECK(run_mode(false, 31) > run_mode(true, 31));
}

TEST_CASE("teleport csv rows follow the frozen schemas") {
    CHECK(teleport_csv_header() == "shot,wait_ns,fidelity,dropped");
    CHECK(logical_csv_header() == "shot,syndrome,logical_error");
    TeleportShot s{3, 1500, 0.875, false};
    CHECK(teleport_csv_row(s) == "3,1500,0.875,0");
    TeleportShot d{4, 900, 0.0, true};
    CHECK(teleport_csv_row(d) == "4,900,,1");
    LogicalShot l{2, "IIZIIXIII", true, 0.5};
    CHECK(logical_csv_row(l) == "2,IIZIIXIII,1");
}

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ebnsim/netmodel.hpp"
#include "ebnsim/protocols.hpp"

namespace ebnsim::hypervisor {

constexpr double kCostEps = 1e-9;

struct VEdge {
    int u = -1, v = -1;     // node indices
    int link_index = -1;
    double f_hat = 0.0;     // estimated mean link fidelity
    double half_width = 0.0;  // 95% normal-approximation half-width
    double cost = 0.0;      // -ln(max(eps, (4 f_hat - 1) / 3))
    bool usable = false;    // f_hat > 0.25 + eps and attempts can succeed
};

struct VirtualGraph {
    const netmodel::Topology* topo = nullptr;
    std::vector<VEdge> edges;

    std::string to_json() const;
    std::string to_csv() const;
};

// Estimates each link's fidelity from n independent generation cycles,
// including the source-side memory dwell while the photon is in flight.
VirtualGraph estimate_link_fidelities(const netmodel::Topology& topo, int n,
                                      std::uint64_t master_seed);

struct RouteResult {
    std::vector<int> nodes;  // s first, d last
    double predicted_fidelity = 0.0;
    double cost = 0.0;
};

// Max-fidelity route (Dijkstra on additive log costs); ties broken by fewer
// hops, then lexicographic node ids. nullopt when s and d are disconnected.
// include_unusable admits edges whose estimate sits at the fully mixed floor.
std::optional<RouteResult> route(const VirtualGraph& vg, const std::string& s,
                                 const std::string& d, bool include_unusable = false);

// Number of pumping rounds needed to lift a Werner pair at f_path to
// f_target; nullopt when infeasible (f_path <= 0.5 or rounds exceed cap).
std::optional<int> plan_purification(double f_path, double f_target, int cap = 5);

struct RequestPlan {
    netmodel::RequestSpec req;
    RouteResult route;
    protocols::PurifyMode purify_mode = protocols::PurifyMode::None;
    int purification_rounds = 0;
    bool feasible = false;
    std::string reason;  // when infeasible
};

// Routes one request over the virtual graph and plans its purification.
RequestPlan plan_request(const VirtualGraph& vg, const netmodel::RequestSpec& req);

// Arrival-order admission: reserves memory positions along each plan's path,
// queues requests that conflict with running ones, and re-admits on release.
class Hypervisor {
public:
    // app(plan, assignment, done): run the application; call done() to
    // release the reservation.
    using AppFn = std::function<void(const RequestPlan&, const protocols::PathAssignment&,
                                     std::function<void()> done)>;

    explicit Hypervisor(protocols::NetworkRuntime& net) : net_(&net) {}

    void submit(RequestPlan plan, AppFn app);
    int running() const { return running_; }
    int waiting() const { return static_cast<int>(queue_.size()); }

private:
    struct Pending {
        RequestPlan plan;
        AppFn app;
    };

    void pump();
    std::optional<protocols::PathAssignment> try_reserve(const RequestPlan& plan);
    void release(const protocols::PathAssignment& pa);

    protocols::NetworkRuntime* net_;
    std::deque<Pending> queue_;
    int running_ = 0;
};

}  // namespace ebnsim::hypervisor

#include "ebnsim/hypervisor.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include <json.hpp>

#include "ebnsim/metrics.hpp"

namespace ebnsim::hypervisor {

using nlohmann::json;

namespace {

double werner_param(double f) { return (4.0 * f - 1.0) / 3.0; }

double edge_cost(double f_hat) { return -std::log(std::max(kCostEps, werner_param(f_hat))); }

}  // namespace

std::string VirtualGraph::to_json() const {
    json doc;
    doc["nodes"] = json::array();
    for (const auto& n : topo->nodes) doc["nodes"].push_back(n.id);
    doc["edges"] = json::array();
    for (const auto& e : edges) {
        doc["edges"].push_back({{"u", topo->nodes[e.u].id},
                                {"v", topo->nodes[e.v].id},
                                {"f_hat", e.f_hat},
                                {"half_width", e.half_width},
                                {"cost", e.cost},
                                {"usable", e.usable}});
    }
    return doc.dump(2);
}

std::string VirtualGraph::to_csv() const {
    std::string out = "u,v,f_hat,half_width,cost,usable\n";
    for (const auto& e : edges) {
        out += topo->nodes[e.u].id + "," + topo->nodes[e.v].id + "," +
               metrics::format_double(e.f_hat) + "," + metrics::format_double(e.half_width) + "," +
               metrics::format_double(e.cost) + "," + (e.usable ? "1" : "0") + "\n";
    }
    return out;
}

VirtualGraph estimate_link_fidelities(const netmodel::Topology& topo, int n,
                                      std::uint64_t master_seed) {
    if (n < 2) throw std::invalid_argument("estimate_link_fidelities: n must be >= 2");
    VirtualGraph vg;
    vg.topo = &topo;
    for (std::size_t li = 0; li < topo.links.size(); ++li) {
        const auto& link = topo.links[li];
        VEdge e;
        e.u = topo.node_index(link.u);
        e.v = topo.node_index(link.v);
        e.link_index = static_cast<int>(li);
        double p = netmodel::attempt_success_probability(link, topo.nodes[e.u].tech);
        if (p > 0.0) {
            RngStream rng(master_seed, "est/" + link.u + "-" + link.v);
            double sum = 0.0, sumsq = 0.0;
            for (int t = 0; t < n; ++t) {
                (void)rng.geometric_trials(p);  // heralding attempts until success
                auto st = netmodel::fresh_link_pair(link, 0);
                const auto& mem = topo.nodes[e.u].memory_noise;
                if (mem.kind != qstate::NoiseChannel::Kind::None && link.delay_ns_exact() > 0)
                    st = qstate::apply_noise(st, qstate::Qubit::A, mem, link.delay_ns_exact());
                double f = qstate::fidelity_to_phi_plus(st);
                sum += f;
                sumsq += f * f;
            }
            e.f_hat = sum / n;
            double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1));
            e.half_width = 1.96 * std::sqrt(var / n);
        }
        e.cost = edge_cost(e.f_hat);
        e.usable = p > 0.0 && e.f_hat > 0.25 + kCostEps;
        vg.edges.push_back(e);
    }
    return vg;
}

std::optional<RouteResult> route(const VirtualGraph& vg, const std::string& s,
                                 const std::string& d, bool include_unusable) {
    const auto& topo = *vg.topo;
    int src = topo.node_index(s), dst = topo.node_index(d);

    std::vector<std::vector<const VEdge*>> adj(topo.nodes.size());
    for (const auto& e : vg.edges) {
        if (!e.usable && !include_unusable) continue;
        adj[e.u].push_back(&e);
        adj[e.v].push_back(&e);
    }

    struct Label {
        double cost;
        int hops;
        std::vector<std::string> ids;  // for lexicographic ties
        std::vector<int> nodes;
        int at;
        bool operator>(const Label& o) const {
            if (cost != o.cost) return cost > o.cost;
            if (hops != o.hops) return hops > o.hops;
            return ids > o.ids;
        }
    };

    std::priority_queue<Label, std::vector<Label>, std::greater<Label>> pq;
    std::vector<bool> done(topo.nodes.size(), false);
    pq.push(Label{0.0, 0, {topo.nodes[src].id}, {src}, src});
    while (!pq.empty()) {
        Label label = pq.top();
        int u = label.at;
        pq.pop();
        if (done[u]) continue;
        done[u] = true;
        if (u == dst) {
            RouteResult r;
            r.nodes = label.nodes;
            r.cost = label.cost;
            double w = 1.0;
            for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i) {
                const auto* link = topo.find_link(topo.nodes[r.nodes[i]].id,
                                                  topo.nodes[r.nodes[i + 1]].id);
                for (const auto& e : vg.edges)
                    if (&topo.links[e.link_index] == link) w *= werner_param(e.f_hat);
            }
            r.predicted_fidelity = (3.0 * w + 1.0) / 4.0;
            return r;
        }
        for (const VEdge* e : adj[u]) {
            int v = e->u == u ? e->v : e->u;
            if (done[v]) continue;
            // intermediate hops must be switches
            if (v != dst && topo.nodes[v].kind != netmodel::NodeSpec::Kind::Switch) continue;
            Label next = label;
            next.cost += e->cost;
            next.hops += 1;
            next.ids.push_back(topo.nodes[v].id);
            next.nodes.push_back(v);
            next.at = v;
            pq.push(std::move(next));
        }
    }
    return std::nullopt;
}

std::optional<int> plan_purification(double f_path, double f_target, int cap) {
    if (f_path >= f_target) return 0;
    if (f_path <= 0.5) return std::nullopt;
    qstate::Mat4 fresh = qstate::PairState::werner(f_path).rho;
    qstate::Mat4 kept = fresh;
    for (int rounds = 1; rounds <= cap; ++rounds) {
        kept = qstate::dejmps_map(kept, fresh).kept;
        double f = qstate::fidelity_to_phi_plus(kept);
        if (f >= f_target) return rounds;
    }
    return std::nullopt;
}

RequestPlan plan_request(const VirtualGraph& vg, const netmodel::RequestSpec& req) {
    RequestPlan plan;
    plan.req = req;
    auto r = route(vg, req.s, req.d);
    // a request that accepts any fidelity may run over edges the estimator
    // flagged as fully mixed
    if (!r && req.f_min <= 0.25) r = route(vg, req.s, req.d, true);
    if (!r) {
        plan.reason = "no path from '" + req.s + "' to '" + req.d + "'";
        return plan;
    }
    plan.route = *r;
    if (req.purify == "off") {
        plan.purify_mode = protocols::PurifyMode::None;
        if (r->predicted_fidelity < req.f_min) {
            plan.reason = "predicted fidelity below f_min with purification off";
            return plan;
        }
    } else if (req.purify == "adaptive") {
        plan.purify_mode = protocols::PurifyMode::Adaptive;
    } else if (req.purify == "planned") {
        auto rounds = plan_purification(r->predicted_fidelity, req.f_min, req.purify_cap);
        if (!rounds) {
            plan.reason = "purification cannot reach f_min from predicted fidelity " +
                          metrics::format_double(r->predicted_fidelity);
            return plan;
        }
        plan.purification_rounds = *rounds;
        plan.purify_mode =
            *rounds > 0 ? protocols::PurifyMode::Fixed : protocols::PurifyMode::None;
    } else {
        plan.reason = "unknown purify mode '" + req.purify + "'";
        return plan;
    }
    plan.feasible = true;
    return plan;
}

void Hypervisor::submit(RequestPlan plan, AppFn app) {
    queue_.push_back({std::move(plan), std::move(app)});
    pump();
}

void Hypervisor::pump() {
    for (auto it = queue_.begin(); it != queue_.end();) {
        auto pa = try_reserve(it->plan);
        if (!pa) {
            ++it;
            continue;
        }
        Pending pending = std::move(*it);
        it = queue_.erase(it);
        ++running_;
        auto assignment = std::make_shared<protocols::PathAssignment>(std::move(*pa));
        auto done = [this, assignment]() {
            release(*assignment);
            --running_;
            pump();
        };
        pending.app(pending.plan, *assignment, done);
    }
}

std::optional<protocols::PathAssignment> Hypervisor::try_reserve(const RequestPlan& plan) {
    const auto& nodes = plan.route.nodes;
    protocols::PathAssignment pa;
    pa.request_id = plan.req.id;
    pa.nodes = nodes;
    pa.predicted_fidelity = plan.route.predicted_fidelity;
    pa.purification_rounds = plan.purification_rounds;
    pa.reserved.resize(nodes.size());
    int last = static_cast<int>(nodes.size()) - 1;
    for (int pos = 0; pos <= last; ++pos) {
        auto& nr = net_->node(nodes[pos]);
        std::vector<int> free;
        for (std::size_t slot = 0; slot < nr.slots.size(); ++slot)
            if (nr.slots[slot].reserved_by.empty()) free.push_back(static_cast<int>(slot));
        if (free.size() < 2) return std::nullopt;
        protocols::NodeReservation& r = pa.reserved[pos];
        if (pos == 0) {
            r.toward_d = free[0];
            r.aux = free[1];
        } else if (pos == last) {
            r.toward_s = free[0];
            r.aux = free[1];
        } else {
            r.toward_s = free[0];
            r.toward_d = free[1];
        }
    }
    for (int pos = 0; pos <= last; ++pos) {
        const auto& r = pa.reserved[pos];
        for (int slot : {r.toward_s, r.toward_d, r.aux})
            if (slot >= 0) net_->reserve(nodes[pos], slot, plan.req.id);
    }
    return pa;
}

void Hypervisor::release(const protocols::PathAssignment& pa) {
    for (std::size_t pos = 0; pos < pa.nodes.size(); ++pos) {
        const auto& r = pa.reserved[pos];
        for (int slot : {r.toward_s, r.toward_d, r.aux})
            if (slot >= 0) net_->release(pa.nodes[pos], slot);
    }
}

}  // namespace ebnsim::hypervisor

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ebnsim/deskernel.hpp"
#include "ebnsim/metrics.hpp"
#include "ebnsim/netmodel.hpp"
#include "ebnsim/qstate.hpp"

namespace ebnsim::protocols {

// A shared entangled pair; qubit A always sits at the node closer to the
// request source so corrections target Qubit::B.
struct EntangledPair {
    qstate::PairState st;
    int pos_a = -1, pos_b = -1;  // positions along the request path
    std::uint64_t tag = 0;       // pipeline tag, guards against stale qubits
};
using PairPtr = std::shared_ptr<EntangledPair>;

struct MemorySlot {
    PairPtr pair;
    qstate::Qubit side = qstate::Qubit::A;
    std::string reserved_by;  // request id; empty = unreserved
};

struct NodeRuntime {
    const netmodel::NodeSpec* spec = nullptr;
    std::vector<MemorySlot> slots;
    bool processor_busy = false;
    std::deque<std::pair<double, std::function<void()>>> processor_queue;
};

// Mutable simulation-side view of the topology: memories, processors and
// lazy memory noise.
class NetworkRuntime {
public:
    NetworkRuntime(Simulation& sim, const netmodel::Topology& topo);

    Simulation& sim() { return *sim_; }
    const netmodel::Topology& topo() const { return *topo_; }
    NodeRuntime& node(int idx) { return nodes_[idx]; }

    // Applies the node's memory noise for the elapsed interval to the qubit
    // stored in (node, slot), if any.
    void touch(int node, int slot);
    void apply_gate_noise(int node, int slot);
    // Claims a memory position for a request; throws if another holds it.
    void reserve(int node, int slot, const std::string& request_id);
    void release(int node, int slot);
    void put(int node, int slot, PairPtr pair, qstate::Qubit side, const std::string& request_id);
    void clear(int node, int slot);
    PairPtr at(int node, int slot) const { return nodes_[node].slots[slot].pair; }

    // One instruction at a time per node; `done` runs at completion.
    void submit_instruction(int node, double duration_ns, std::function<void()> done);

    std::int64_t classical_delay_ns(const std::vector<int>& path_nodes, int from_pos, int to_pos) const;

private:
    void start_next(int node);

    Simulation* sim_;
    const netmodel::Topology* topo_;
    std::vector<NodeRuntime> nodes_;
};

struct NodeReservation {
    int toward_s = -1;  // slot facing the source (unused at s)
    int toward_d = -1;  // slot facing the destination (unused at d)
    int aux = -1;       // second end-node slot, used by purification pipelines
};

struct PathAssignment {
    std::string request_id;
    std::vector<int> nodes;  // s first, d last
    double predicted_fidelity = 1.0;
    int purification_rounds = 0;
    std::vector<NodeReservation> reserved;  // parallel to `nodes`
};

enum class PurifyMode { None, Fixed, Adaptive };

// Runs E2E attempts over a pre-assigned path: parallel heralded link
// generation, swap-asap Bell measurements at the switches, Pauli corrections
// at the destination, and optional DEJMPS pumping at the end nodes.
class PathManager {
public:
    struct Config {
        PathAssignment path;
        netmodel::RequestSpec request;
        PurifyMode purify_mode = PurifyMode::None;
        int fixed_rounds = 0;
        double adaptive_threshold = 0.95;
        int round_cap = 5;
    };

    using DeliveredFn = std::function<void(const qstate::PairState&, const metrics::AttemptRecord&)>;
    using FailedFn = std::function<void(const metrics::AttemptRecord&)>;

    PathManager(NetworkRuntime& net, Config cfg, metrics::Collector& collector);

    // Requests one E2E pair; exactly one of the callbacks fires.
    void ask(DeliveredFn on_ready, FailedFn on_fail);
    // Flushes any in-flight attempt without recording it.
    void cancel();

    int attempts_started() const { return attempt_index_; }
    const Config& config() const { return cfg_; }

private:
    struct Hop {
        const netmodel::LinkSpec* link;
        int from_pos, to_pos;  // positions in path.nodes
        bool forward;          // link.u is the from-side node
        double p_success;
        double cycle_ns;
    };

    void begin_pipeline(bool secondary);
    void start_generation(std::size_t hop_idx);
    void on_link_generated(std::size_t hop_idx, std::uint64_t pipe_seq);
    void maybe_swap(int path_pos);
    void do_swap(int path_pos, std::uint64_t pipe_seq);
    void on_correction(int outcome, std::uint64_t pipe_seq);
    void apply_correction_at_destination(int outcome);
    void on_pipeline_ready();
    bool want_more_purification();
    void start_distillation();
    void finish_distillation(std::uint64_t pipe_seq);
    void deliver();
    void on_deadline();
    void flush_slots();
    int slot_for(int path_pos, bool facing_d, bool secondary) const;

    NetworkRuntime& net_;
    Config cfg_;
    metrics::Collector& collector_;
    std::vector<Hop> hops_;
    int switch_count_ = 0;

    // per-ask state
    bool active_ = false;
    std::uint64_t epoch_ = 0;
    std::uint64_t pipeline_seq_ = 0;
    bool pipeline_secondary_ = false;
    int links_pending_ = 0;
    int corrections_received_ = 0;
    int swaps_completed_ = 0;
    std::vector<int> pending_corrections_;
    std::vector<bool> swap_submitted_;
    bool distil_s_done_ = false, distil_d_done_ = false;
    int rounds_done_ = 0;
    std::int64_t t_ask_ = 0;
    std::int64_t t_gen_done_ = -1, t_swaps_done_ = -1, t_corr_done_ = -1;
    bool base_marks_frozen_ = false;
    std::int64_t m1_ = 0, m2_ = 0, m3_ = 0;  // cumulative phase marks
    std::optional<Simulation::EventId> deadline_event_;
    int attempt_index_ = 0;
    DeliveredFn on_ready_;
    FailedFn on_fail_;
};

}  // namespace ebnsim::protocols

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ebnsim/metrics.hpp"
#include "ebnsim/protocols.hpp"

namespace ebnsim::apps {

// Pure input qubit from a spec string: "0", "1", "+", "i+", or "haar"
// (seeded random pure state).
qstate::Mat2 input_state(const std::string& spec, RngStream& rng);

struct TeleportShot {
    int shot = 0;
    std::int64_t wait_ns = 0;
    double fidelity = 0.0;
    bool dropped = false;
};

struct LogicalShot {
    int shot = 0;
    std::string syndrome;  // nine per-qubit Pauli labels, e.g. "IIZIIXIII"
    bool logical_error = false;
    double fidelity = 0.0;  // teleported logical-state fidelity (not in CSV)
};

std::string teleport_csv_header();
std::string teleport_csv_row(const TeleportShot& s);
std::string logical_csv_header();
std::string logical_csv_row(const LogicalShot& s);

// Bounded queue of application payloads awaiting pairs. FIFO drops the
// incoming item when full; LIFO keeps the fresh item and drops the oldest.
class DemandBuffer {
public:
    enum class Policy { FIFO, LIFO };

    struct Item {
        int id = 0;
        std::int64_t arrived_at = 0;
        qstate::Mat2 state;
    };

    DemandBuffer(Policy policy, int max_size) : policy_(policy), max_size_(max_size) {}

    // Returns the item dropped by this push, if any.
    std::optional<Item> push(Item item);
    std::optional<Item> pop();

    int size() const { return static_cast<int>(q_.size()); }
    int arrivals() const { return arrivals_; }
    int drops() const { return drops_; }

private:
    Policy policy_;
    int max_size_;
    std::deque<Item> q_;
    int arrivals_ = 0;
    int drops_ = 0;
};

// Shor [9,1] decoding of nine i.i.d. Pauli labels (Bell-index convention
// k = (x<<1)|z). Majority vote on bit flips within each 3-block; phase vote
// across blocks. Returns the residual logical Pauli after correction.
struct ShorOutcome {
    int logical = 0;  // residual logical Pauli, Bell-index convention
    std::string labels;
};
ShorOutcome shor_decode(const std::array<int, 9>& labels);

struct AppOutputs {
    std::vector<TeleportShot> shots;
    std::vector<LogicalShot> logical;
    int buffer_arrivals = 0;
    int buffer_drops = 0;
    int buffer_residual = 0;
};

// Runs one request's application on top of a PathManager until the
// persistence time elapses (or the first abort).
class AppRunner {
public:
    AppRunner(protocols::NetworkRuntime& net, protocols::PathManager::Config cfg,
              metrics::Collector& collector);

    void run(std::function<void()> done);
    const AppOutputs& outputs() const { return out_; }

private:
    void ask();
    void on_delivered(const qstate::PairState& pair, const metrics::AttemptRecord& rec);
    void finish();
    void schedule_arrival();
    void process_shor_shot();
    RngStream& rng(const std::string& what);

    protocols::NetworkRuntime& net_;
    netmodel::RequestSpec req_;
    metrics::Collector& coll_;
    protocols::PathManager pm_;
    AppOutputs out_;
    std::int64_t start_ = 0, end_ = 0;
    std::function<void()> done_;
    bool finished_ = false;
    bool asking_ = false;
    int shot_ = 0;
    DemandBuffer buffer_;
    qstate::Mat2 pending_input_;  // free-running teleport input for this shot
    std::vector<std::pair<std::int64_t, qstate::Mat4>> shor_pairs_;
};

}  // namespace ebnsim::apps

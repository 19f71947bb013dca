#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include "ebnsim/rng.hpp"

namespace ebnsim {

// Deterministic single-threaded discrete-event kernel. Time is integer
// nanoseconds; simultaneous events are delivered in insertion order.
class Simulation {
public:
    using EventId = std::uint64_t;

    struct Stats {
        std::uint64_t events_processed = 0;
        std::int64_t final_time = 0;
    };

    explicit Simulation(std::uint64_t master_seed) : master_seed_(master_seed) {}

    std::int64_t now() const { return now_; }
    std::uint64_t master_seed() const { return master_seed_; }

    EventId schedule(std::int64_t at, std::function<void()> fn) {
        if (at < now_) throw std::invalid_argument("schedule: event in the past");
        EventId id = next_id_++;
        Key key{at, next_seq_++};
        queue_.emplace(key, Entry{id, std::move(fn)});
        index_.emplace(id, key);
        return id;
    }

    EventId schedule_in(std::int64_t dt, std::function<void()> fn) {
        return schedule(now_ + dt, std::move(fn));
    }

    void cancel(EventId id) {
        auto it = index_.find(id);
        if (it == index_.end()) return;  // already delivered or cancelled
        queue_.erase(it->second);
        index_.erase(it);
    }

    Stats run_until(std::optional<std::int64_t> t_end = std::nullopt) {
        Stats stats;
        while (!queue_.empty()) {
            auto it = queue_.begin();
            if (t_end && it->first.time > *t_end) break;
            now_ = it->first.time;
            auto fn = std::move(it->second.fn);
            index_.erase(it->second.id);
            queue_.erase(it);
            fn();
            ++stats.events_processed;
        }
        if (t_end && *t_end > now_) now_ = *t_end;
        stats.final_time = now_;
        return stats;
    }

    bool empty() const { return queue_.empty(); }

    // One stream per entity path, derived from the master seed; creation
    // order does not affect the draw sequences.
    RngStream& rng(const std::string& path) {
        auto it = streams_.find(path);
        if (it == streams_.end())
            it = streams_.emplace(path, std::make_unique<RngStream>(master_seed_, path)).first;
        return *it->second;
    }

private:
    struct Key {
        std::int64_t time;
        std::uint64_t seq;
        bool operator<(const Key& o) const {
            return time != o.time ? time < o.time : seq < o.seq;
        }
        bool operator==(const Key& o) const { return time == o.time && seq == o.seq; }
    };

    struct Entry {
        EventId id;
        std::function<void()> fn;
    };

    std::int64_t now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_id_ = 1;
    std::uint64_t master_seed_;
    std::map<Key, Entry> queue_;
    std::unordered_map<EventId, Key> index_;
    std::unordered_map<std::string, std::unique_ptr<RngStream>> streams_;
};

}  // namespace ebnsim

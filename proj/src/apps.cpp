#include "ebnsim/apps.hpp"

#include <cmath>
#include <stdexcept>

namespace ebnsim::apps {

using qstate::Mat2;
using qstate::Mat4;

namespace {

constexpr std::int64_t kForever = std::numeric_limits<std::int64_t>::max();

Mat2 pauli_2x2(int k) {
    Mat2 m = Mat2::Identity();
    if (k & 1) {
        Mat2 z;
        z << 1, 0, 0, -1;
        m = z * m;
    }
    if (k & 2) {
        Mat2 x;
        x << 0, 1, 1, 0;
        m = x * m;
    }
    return m;
}

char label_char(int k) { return "IZXY"[k]; }

}  // namespace

Mat2 input_state(const std::string& spec, RngStream& rng) {
    Eigen::Vector2cd v;
    if (spec == "0") {
        v << 1, 0;
    } else if (spec == "1") {
        v << 0, 1;
    } else if (spec == "+") {
        v << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    } else if (spec == "i+") {
        v << 1 / std::sqrt(2.0), std::complex<double>(0, 1 / std::sqrt(2.0));
    } else if (spec == "haar") {
        v << std::complex<double>(rng.normal(), rng.normal()),
            std::complex<double>(rng.normal(), rng.normal());
        v.normalize();
    } else {
        throw std::invalid_argument("unknown input state '" + spec + "'");
    }
    return v * v.adjoint();
}

std::string teleport_csv_header() { return "shot,wait_ns,fidelity,dropped"; }

std::string teleport_csv_row(const TeleportShot& s) {
    std::string row = std::to_string(s.shot) + "," + std::to_string(s.wait_ns) + ",";
    if (!s.dropped) row += metrics::format_double(s.fidelity);
    row += std::string(",") + (s.dropped ? "1" : "0");
    return row;
}

std::string logical_csv_header() { return "shot,syndrome,logical_error"; }

std::string logical_csv_row(const LogicalShot& s) {
    return std::to_string(s.shot) + "," + s.syndrome + "," + (s.logical_error ? "1" : "0");
}

std::optional<DemandBuffer::Item> DemandBuffer::push(Item item) {
    ++arrivals_;
    std::optional<Item> dropped;
    if (static_cast<int>(q_.size()) >= max_size_) {
        ++drops_;
        if (policy_ == Policy::FIFO) return item;  // tail drop
        dropped = q_.front();                      // LIFO keeps the fresh item
        q_.pop_front();
    }
    q_.push_back(std::move(item));
    return dropped;
}

std::optional<DemandBuffer::Item> DemandBuffer::pop() {
    if (q_.empty()) return std::nullopt;
    Item item = policy_ == Policy::FIFO ? q_.front() : q_.back();
    if (policy_ == Policy::FIFO)
        q_.pop_front();
    else
        q_.pop_back();
    return item;
}

ShorOutcome shor_decode(const std::array<int, 9>& labels) {
    ShorOutcome out;
    int blocks_with_residual_flip = 0;  // >= 2 bit flips beat the in-block majority
    int blocks_with_odd_phase = 0;
    for (int b = 0; b < 3; ++b) {
        int x_count = 0, z_parity = 0;
        for (int i = 0; i < 3; ++i) {
            int k = labels[b * 3 + i];
            x_count += (k >> 1) & 1;
            z_parity ^= k & 1;
        }
        if (x_count >= 2) ++blocks_with_residual_flip;
        blocks_with_odd_phase += z_parity;
    }
    // a residual X(x)X(x)X on one block acts as logical Z; the phase vote
    // mis-corrects (acting as logical X) when >= 2 blocks carry odd phase
    int logical_z = blocks_with_residual_flip & 1;
    int logical_x = blocks_with_odd_phase >= 2 ? 1 : 0;
    out.logical = (logical_x << 1) | logical_z;
    for (int k : labels) out.labels += label_char(k);
    return out;
}

AppRunner::AppRunner(protocols::NetworkRuntime& net, protocols::PathManager::Config cfg,
                     metrics::Collector& collector)
    : net_(net),
      req_(cfg.request),
      coll_(collector),
      pm_(net, std::move(cfg), collector),
      buffer_(req_.buffer_policy == "lifo" ? DemandBuffer::Policy::LIFO
                                           : DemandBuffer::Policy::FIFO,
              req_.buffer_size) {
    if (req_.app == "teleport_demand" && req_.rate_hz <= 0)
        throw std::invalid_argument("request '" + req_.id + "': teleport_demand needs rate_hz > 0");
    if (req_.app != "capacity" && req_.app != "teleport" && req_.app != "teleport_demand" &&
        req_.app != "teleport_shor")
        throw std::invalid_argument("request '" + req_.id + "': unknown app '" + req_.app + "'");
}

RngStream& AppRunner::rng(const std::string& what) {
    return net_.sim().rng("app/" + req_.id + "/" + what);
}

void AppRunner::run(std::function<void()> done) {
    done_ = std::move(done);
    start_ = net_.sim().now();
    std::int64_t pers = req_.persistence_ns();
    end_ = pers > kForever - start_ ? kForever : start_ + pers;
    if (req_.app == "teleport_demand") {
        if (end_ == kForever)
            throw std::invalid_argument("teleport_demand needs a finite persistence time");
        schedule_arrival();
        net_.sim().schedule(end_, [this]() {
            if (finished_) return;
            pm_.cancel();
            finish();
        });
    } else {
        ask();
    }
}

void AppRunner::ask() {
    pm_.ask(
        [this](const qstate::PairState& pair, const metrics::AttemptRecord& rec) {
            if (!finished_) on_delivered(pair, rec);
        },
        [this](const metrics::AttemptRecord&) {
            if (!finished_) finish();
        });
}

void AppRunner::on_delivered(const qstate::PairState& pair, const metrics::AttemptRecord& rec) {
    std::int64_t now = net_.sim().now();
    if (req_.app == "capacity") {
        if (now < end_)
            ask();
        else
            finish();
    } else if (req_.app == "teleport") {
        Mat2 in = input_state(req_.input_state, rng("input"));
        Mat2 out = qstate::choi_apply(qstate::teleport_choi(pair.rho), in);
        TeleportShot shot;
        shot.shot = shot_++;
        shot.wait_ns = rec.t_total_ns;
        shot.fidelity = std::real((in * out).trace());
        out_.shots.push_back(shot);
        if (now < end_)
            ask();
        else
            finish();
    } else if (req_.app == "teleport_demand") {
        auto item = buffer_.pop();
        if (!item) {
            asking_ = false;
            return;
        }
        std::int64_t wait = now - item->arrived_at;
        const auto& mem = net_.topo().nodes[pm_.config().path.nodes.front()].memory_noise;
        Mat2 held = qstate::apply_noise_1q(item->state, mem, static_cast<double>(wait));
        Mat2 out = qstate::choi_apply(qstate::teleport_choi(pair.rho), held);
        TeleportShot shot;
        shot.shot = item->id;
        shot.wait_ns = wait;
        shot.fidelity = std::real((item->state * out).trace());
        out_.shots.push_back(shot);
        if (buffer_.size() > 0)
            ask();
        else
            asking_ = false;
    } else {  // teleport_shor
        shor_pairs_.emplace_back(now, pair.rho);
        if (shor_pairs_.size() < 9) {
            ask();
            return;
        }
        process_shor_shot();
        if (net_.sim().now() < end_)
            ask();
        else
            finish();
    }
}

void AppRunner::process_shor_shot() {
    std::int64_t t_last = shor_pairs_.back().first;
    int s_node = pm_.config().path.nodes.front();
    int d_node = pm_.config().path.nodes.back();
    const auto& mem_s = net_.topo().nodes[s_node].memory_noise;
    const auto& mem_d = net_.topo().nodes[d_node].memory_noise;
    std::array<int, 9> labels{};
    for (int i = 0; i < 9; ++i) {
        Mat4 rho = shor_pairs_[i].second;
        if (!req_.parallel_paths) {
            double wait = static_cast<double>(t_last - shor_pairs_[i].first);
            if (wait > 0) {
                rho = qstate::apply_noise_rho(rho, qstate::Qubit::A, mem_s, wait);
                rho = qstate::repair_psd(qstate::apply_noise_rho(rho, qstate::Qubit::B, mem_d, wait));
            }
        }
        auto tw = qstate::pauli_twirl(qstate::teleport_choi(rho));
        labels[i] = rng("shor").sample_discrete(tw);
    }
    auto decoded = shor_decode(labels);
    Mat2 in = input_state(req_.input_state, rng("input"));
    Mat2 p = pauli_2x2(decoded.logical);
    Mat2 out = p * in * p.adjoint();
    LogicalShot shot;
    shot.shot = shot_++;
    shot.syndrome = decoded.labels;
    shot.logical_error = decoded.logical != 0;
    shot.fidelity = std::real((in * out).trace());
    out_.logical.push_back(shot);
    shor_pairs_.clear();
}

void AppRunner::schedule_arrival() {
    std::int64_t period = static_cast<std::int64_t>(std::llround(1e9 / req_.rate_hz));
    if (period <= 0) period = 1;
    std::int64_t t = net_.sim().now() + period;
    if (t >= end_) return;
    net_.sim().schedule(t, [this]() {
        if (finished_) return;
        DemandBuffer::Item item;
        item.id = buffer_.arrivals();
        item.arrived_at = net_.sim().now();
        item.state = input_state(req_.input_state, rng("input"));
        auto dropped = buffer_.push(std::move(item));
        if (dropped) {
            TeleportShot shot;
            shot.shot = dropped->id;
            shot.wait_ns = net_.sim().now() - dropped->arrived_at;
            shot.dropped = true;
            out_.shots.push_back(shot);
        }
        if (!asking_ && buffer_.size() > 0) {
            asking_ = true;
            ask();
        }
        schedule_arrival();
    });
}

void AppRunner::finish() {
    if (finished_) return;
    finished_ = true;
    out_.buffer_arrivals = buffer_.arrivals();
    out_.buffer_drops = buffer_.drops();
    out_.buffer_residual = buffer_.size();
    if (done_) done_();
}

}  // namespace ebnsim::apps

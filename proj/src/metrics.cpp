#include "ebnsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ebnsim::metrics {

double processing_overhead_ms(const std::vector<AttemptRecord>& records) {
    if (records.empty()) throw std::invalid_argument("processing_overhead: no records");
    double sum_t = 0.0;
    int successes = 0;
    for (const auto& r : records) {
        sum_t += static_cast<double>(r.t_total_ns);
        successes += r.success;
    }
    if (successes == 0) return std::numeric_limits<double>::infinity();
    return sum_t / successes * 1e-6;
}

double capacity_eprs_per_s(const std::vector<AttemptRecord>& records, double persistence_ns) {
    if (records.empty()) throw std::invalid_argument("capacity: no records");
    double sum = 0.0;
    int successes = 0;
    for (const auto& r : records) {
        if (!r.success) continue;
        ++successes;
        double t_s = std::min(persistence_ns, static_cast<double>(r.t_total_ns)) * 1e-9;
        sum += 1.0 / t_s;
    }
    if (successes == 0) return 0.0;
    return sum / successes;
}

double fidelity_mean(const std::vector<AttemptRecord>& records) {
    double sum = 0.0;
    int successes = 0;
    for (const auto& r : records) {
        if (!r.success) continue;
        if (!r.fidelity) throw std::invalid_argument("fidelity_mean: success without fidelity");
        sum += *r.fidelity;
        ++successes;
    }
    if (successes == 0) throw std::invalid_argument("fidelity_mean: no successes");
    return sum / successes;
}

double fidelity_stderr(const std::vector<AttemptRecord>& records) {
    double mean = fidelity_mean(records);
    double sq = 0.0;
    int successes = 0;
    for (const auto& r : records) {
        if (!r.success) continue;
        sq += (*r.fidelity - mean) * (*r.fidelity - mean);
        ++successes;
    }
    if (successes < 2) return 0.0;
    return std::sqrt(sq / (successes - 1) / successes);
}

double qber(const std::vector<AttemptRecord>& records) {
    int errors = 0, measured = 0;
    for (const auto& r : records) {
        if (!r.success || !r.bit_s || !r.bit_d) continue;
        ++measured;
        if (*r.bit_s != *r.bit_d) ++errors;
    }
    if (measured == 0) throw std::invalid_argument("qber: no measurements");
    return static_cast<double>(errors) / measured;
}

void Collector::add(AttemptRecord rec) {
    if (rec.t_total_ns != rec.t_e_ns + rec.t_s_ns + rec.t_c_ns + rec.t_p_ns)
        throw std::logic_error("AttemptRecord: t_total != sum of components");
    if (!rec.success && rec.fidelity) throw std::logic_error("AttemptRecord: fidelity on failed attempt");
    rec.request_id = request_id_;
    records_.push_back(std::move(rec));
}

RequestSummary Collector::summarize() const {
    RequestSummary s;
    s.request_id = request_id_;
    s.aborted = aborted_;
    if (records_.empty()) return s;
    s.attempts = static_cast<int>(records_.size());
    for (const auto& r : records_) s.successes += r.success;
    s.overhead_ms = processing_overhead_ms(records_);
    s.capacity_eprs_per_s = capacity_eprs_per_s(records_, persistence_ns_);
    if (s.successes > 0) {
        s.fidelity_mean = fidelity_mean(records_);
        s.fidelity_stderr = fidelity_stderr(records_);
    }
    bool any_bits = false;
    for (const auto& r : records_)
        if (r.success && r.bit_s && r.bit_d) any_bits = true;
    if (any_bits) {
        s.qber = qber(records_);
        s.has_qber = true;
    }
    return s;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string attempts_csv_header() {
    return "request_id,j,c,t_e,t_s,t_c,t_p,t_total_ns,fidelity,bit_s,bit_d";
}

std::string attempts_csv_row(const AttemptRecord& r) {
    std::string row = r.request_id + "," + std::to_string(r.attempt) + "," + std::to_string(r.success) +
                      "," + std::to_string(r.t_e_ns) + "," + std::to_string(r.t_s_ns) + "," +
                      std::to_string(r.t_c_ns) + "," + std::to_string(r.t_p_ns) + "," +
                      std::to_string(r.t_total_ns) + ",";
    row += r.fidelity ? format_double(*r.fidelity) : "";
    row += ",";
    row += r.bit_s ? std::to_string(*r.bit_s) : "";
    row += ",";
    row += r.bit_d ? std::to_string(*r.bit_d) : "";
    return row;
}

std::string summary_csv_header() {
    return "request_id,T_ms,C_eprs_per_s,F_mean,F_stderr,QBER,attempts,successes,aborted";
}

std::string summary_csv_row(const RequestSummary& s) {
    std::string row = s.request_id + "," + format_double(s.overhead_ms) + "," +
                      format_double(s.capacity_eprs_per_s) + "," + format_double(s.fidelity_mean) +
                      "," + format_double(s.fidelity_stderr) + ",";
    row += s.has_qber ? format_double(s.qber) : "";
    row += "," + std::to_string(s.attempts) + "," + std::to_string(s.successes) + "," +
           (s.aborted ? std::string("1") : std::string("0"));
    return row;
}

}  // namespace ebnsim::metrics

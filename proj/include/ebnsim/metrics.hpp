#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ebnsim::metrics {

struct AttemptRecord {
    std::string request_id;
    int attempt = 0;  // j
    int success = 0;  // c_j
    std::int64_t t_e_ns = 0;
    std::int64_t t_s_ns = 0;
    std::int64_t t_c_ns = 0;
    std::int64_t t_p_ns = 0;
    std::int64_t t_total_ns = 0;
    std::optional<double> fidelity;  // only when success
    std::optional<int> bit_s, bit_d;
};

struct RequestSummary {
    std::string request_id;
    double overhead_ms = std::numeric_limits<double>::infinity();  // T
    double capacity_eprs_per_s = 0.0;                              // C
    double fidelity_mean = 0.0;
    double fidelity_stderr = 0.0;
    double qber = 0.0;
    bool has_qber = false;
    int attempts = 0;
    int successes = 0;
    bool aborted = false;
};

// Definition-style aggregates; failed attempts contribute time to the
// overhead but not to capacity or fidelity.
double processing_overhead_ms(const std::vector<AttemptRecord>& records);
double capacity_eprs_per_s(const std::vector<AttemptRecord>& records, double persistence_ns);
double fidelity_mean(const std::vector<AttemptRecord>& records);
double fidelity_stderr(const std::vector<AttemptRecord>& records);
double qber(const std::vector<AttemptRecord>& records);

class Collector {
public:
    explicit Collector(std::string request_id, double persistence_ns)
        : request_id_(std::move(request_id)), persistence_ns_(persistence_ns) {}

    void add(AttemptRecord rec);  // asserts the t_j accounting identity
    void mark_aborted() { aborted_ = true; }

    const std::vector<AttemptRecord>& records() const { return records_; }
    RequestSummary summarize() const;

private:
    std::string request_id_;
    double persistence_ns_;
    bool aborted_ = false;
    std::vector<AttemptRecord> records_;
};

std::string attempts_csv_header();
std::string attempts_csv_row(const AttemptRecord& r);
std::string summary_csv_header();
std::string summary_csv_row(const RequestSummary& s);
// 12 significant digits, locale independent.
std::string format_double(double v);

}  // namespace ebnsim::metrics

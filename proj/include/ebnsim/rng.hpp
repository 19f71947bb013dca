#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ebnsim {

// Stable seed derivation: FNV-1a over the entity path, mixed with the master
// seed through splitmix64. Identical (seed, path) gives an identical stream
// no matter what other streams exist.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view path) {
    return splitmix64(master ^ splitmix64(fnv1a(path)));
}

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::string_view path)
        : eng_(derive_seed(master_seed, path)) {}

    explicit RngStream(std::uint64_t raw_seed) : eng_(raw_seed) {}

    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(eng_);
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

    std::uint64_t integer(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_);
    }

    // Number of Bernoulli(p) attempts up to and including the first success.
    std::int64_t geometric_trials(double p) {
        if (p <= 0.0) throw std::invalid_argument("geometric_trials: p <= 0");
        if (p >= 1.0) return 1;
        return 1 + std::geometric_distribution<std::int64_t>(p)(eng_);
    }

    // Samples an index with probability proportional to probs[i].
    int sample_discrete(std::span<const double> probs) {
        double total = 0.0;
        for (double p : probs) total += p;
        if (total <= 0.0) throw std::runtime_error("sample_discrete: degenerate distribution");
        double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size() - 1);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
};

}  // namespace ebnsim

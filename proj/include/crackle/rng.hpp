#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace crackle {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed for stream `stream` of a run with master seed `master`:
// mix64(master ^ mix64(stream + 0x9e3779b97f4a7c15)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Stream id for replication `rep` of grid point `point`.
inline std::uint64_t replication_stream(std::uint64_t point, std::uint64_t rep) {
    return (point << 32) | (rep & 0xffffffffULL);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(mix64(seed)) {}

    // 53-bit uniform on [0,1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    // uniform on (0,1].
    double uniform_open0() { return 1.0 - uniform(); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int sign() { return (eng_() >> 63) ? 1 : -1; }
    double normal() { return normal_(eng_); }
    double exponential() { return -std::log(uniform_open0()); }
    std::uint64_t poisson(double mean);
    std::uint64_t below(std::uint64_t m);  // uniform on {0..m-1}

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_;
};

}  // namespace crackle

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "crackle/distributions.hpp"
#include "crackle/rng.hpp"

namespace crackle {

struct MomentSums {
    double sum = 0.0;
    double sq = 0.0;
    std::size_t n = 0;
    void add(double v) {
        sum += v;
        sq += v * v;
        ++n;
    }
};

// Chunk count is fixed so results do not depend on the thread count.
constexpr std::size_t kMcChunks = 64;

inline McEstimate finish_moments(const std::vector<MomentSums>& parts) {
    MomentSums t;
    for (const auto& p : parts) {
        t.sum += p.sum;
        t.sq += p.sq;
        t.n += p.n;
    }
    McEstimate e;
    if (t.n == 0) return e;
    double N = static_cast<double>(t.n);
    e.estimate = t.sum / N;
    if (t.n > 1) {
        double var = (t.sq / N - e.estimate * e.estimate) * N / (N - 1.0);
        e.stderr_ = std::sqrt(std::max(var, 0.0) / N);
    }
    return e;
}

// Mean of `draw(rng)` over `samples` draws split into kMcChunks seeded streams.
template <class Draw>
McEstimate mc_mean(std::size_t samples, std::uint64_t seed, Draw draw, bool parallel = true) {
    std::vector<MomentSums> parts(kMcChunks);
    const long chunks = static_cast<long>(kMcChunks);
    auto run = [&](long i) {
        std::size_t cnt = samples / kMcChunks + (static_cast<std::size_t>(i) < samples % kMcChunks ? 1 : 0);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        MomentSums m;
        for (std::size_t j = 0; j < cnt; ++j) m.add(draw(rng));
        parts[i] = m;
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < chunks; ++i) run(i);
    } else {
        for (long i = 0; i < chunks; ++i) run(i);
    }
    return finish_moments(parts);
}

}  // namespace crackle

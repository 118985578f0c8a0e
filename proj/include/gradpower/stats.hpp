#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gradpower/rng.hpp"
#include "gradpower/threads.hpp"

namespace gradpower {

// Welford accumulator with the parallel-combine rule, so per-stream partial
// results merge into exactly one final estimate independent of thread count.
struct MeanVar {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / double(n);
        m2 += d * (x - mean);
    }

    void combine(const MeanVar& o) {
        if (o.n == 0) return;
        if (n == 0) { *this = o; return; }
        const double d = o.mean - mean;
        const long long total = n + o.n;
        mean += d * double(o.n) / double(total);
        m2 += o.m2 + d * d * double(n) * double(o.n) / double(total);
        n = total;
    }

    double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    double stderror() const { return n > 1 ? std::sqrt(variance() / double(n)) : 0.0; }
};

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long long n = 0;
};

// Monte-Carlo mean of sample_fn(rng) over `samples` draws, partitioned into
// `streams` independent substreams seeded as stream_seed(seed, s). The result
// depends on (samples, streams, seed) only, never on the thread count.
template <class F>
McEstimate mc_estimate(std::uint64_t samples, unsigned streams, std::uint64_t seed,
                       F&& sample_fn) {
    if (samples == 0) throw std::invalid_argument("mc_estimate: samples must be > 0");
    if (streams == 0) streams = 1;
    if (streams > samples) streams = static_cast<unsigned>(samples);

    std::vector<MeanVar> parts(streams);
    const std::uint64_t base = samples / streams;
    const std::uint64_t rem = samples % streams;
    parallel_for(streams, [&](std::size_t s) {
        Xoshiro256pp rng(stream_seed(seed, s));
        const std::uint64_t count = base + (s < rem ? 1 : 0);
        MeanVar acc;
        for (std::uint64_t i = 0; i < count; ++i) acc.add(sample_fn(rng));
        parts[s] = acc;
    });

    MeanVar total;
    for (const auto& part : parts) total.combine(part);
    return {total.mean, total.stderror(), total.n};
}

}  // namespace gradpower

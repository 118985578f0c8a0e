#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace gradpower {

// GRADPOWER_THREADS caps worker threads; 0 or unset means auto-detect.
inline unsigned thread_budget() {
    if (const char* env = std::getenv("GRADPOWER_THREADS")) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end != env && n > 0) return static_cast<unsigned>(n);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Runs f(i) for i in [0, n). Work is split into contiguous chunks; callers
// must make iterations independent (each writes its own output slot), which
// keeps results identical for any thread count.
template <class F>
void parallel_for(std::size_t n, F&& f, unsigned max_threads = 0) {
    if (n == 0) return;
    unsigned budget = max_threads ? max_threads : thread_budget();
    if (budget > n) budget = static_cast<unsigned>(n);
    if (budget <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(budget);
    const std::size_t chunk = (n + budget - 1) / budget;
    for (unsigned w = 0; w < budget; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, &f] {
            for (std::size_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace gradpower

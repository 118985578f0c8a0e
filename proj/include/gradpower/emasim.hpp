#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gradpower/noise.hpp"
#include "gradpower/rng.hpp"
#include "gradpower/stats.hpp"
#include "gradpower/transform.hpp"

namespace gradpower {

namespace detail {

inline void ema_validate(double beta1, double beta2, double eps, long steps) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw std::invalid_argument("simulate_ema: betas must be in [0, 1)");
    if (!(eps >= 0.0)) throw std::invalid_argument("simulate_ema: eps must be >= 0");
    if (steps < 1) throw std::invalid_argument("simulate_ema: steps must be >= 1");
}

}  // namespace detail

// Final value u_T of the iteration m_t = b1*m_{t-1} + (1-b1)*phi_p(g_t),
// v_t = b2*v_{t-1} + (1-b2)*phi_p^2(g_t), u_t = m_t/(sqrt(v_t) + eps), with
// g_t i.i.d. from the model. The EMA carries no bias correction, matching the
// definition the limit analysis uses. Deterministic given the seed.
inline double simulate_ema_update(const NoiseModel& model, PowerExponent p, double beta1,
                                  double beta2, double eps, long steps,
                                  std::uint64_t seed) {
    detail::ema_validate(beta1, beta2, eps, steps);
    model.validate();
    Xoshiro256pp rng(seed);
    const double pv = p.value();
    double m = 0.0, v = 0.0;
    for (long t = 0; t < steps; ++t) {
        const double phi = detail::sign_power_raw(model.sample(rng), pv);
        m = beta1 * m + (1.0 - beta1) * phi;
        v = beta2 * v + (1.0 - beta2) * phi * phi;
    }
    const double denom = std::sqrt(v) + eps;
    return (m == 0.0 && denom == 0.0) ? 0.0 : m / denom;
}

struct EmaAverage {
    double mean = 0.0;    // time average of u_t after burn-in
    double stderr_ = 0.0; // batch-means standard error of that average
    int batches = 0;
    long long samples = 0;
    double u_final = 0.0;
};

// Ergodic estimate of the limiting update: time-averages u_t over the steps
// after burn-in, with a batch-means standard error (batch length is chosen
// far above the u_t autocorrelation time, so batch averages are effectively
// independent). This is the figure-reproduction estimator; the final-value
// contract stays with simulate_ema_update.
inline EmaAverage simulate_ema_average(const NoiseModel& model, PowerExponent p,
                                       double beta1, double beta2, double eps, long steps,
                                       std::uint64_t seed, long burnin = 10000,
                                       int batches = 50) {
    detail::ema_validate(beta1, beta2, eps, steps);
    model.validate();
    if (burnin < 0 || burnin >= steps)
        throw std::invalid_argument("simulate_ema_average: need 0 <= burnin < steps");
    if (batches < 2) throw std::invalid_argument("simulate_ema_average: batches must be >= 2");
    const long long averaged = steps - burnin;
    if (averaged < batches)
        throw std::invalid_argument("simulate_ema_average: fewer post-burn-in steps than batches");

    Xoshiro256pp rng(seed);
    const double pv = p.value();
    const long long batch_len = averaged / batches;
    double m = 0.0, v = 0.0, u = 0.0;
    MeanVar batch_means;
    double batch_sum = 0.0;
    long long in_batch = 0;
    int batches_done = 0;
    long long counted = 0;
    for (long t = 0; t < steps; ++t) {
        const double phi = detail::sign_power_raw(model.sample(rng), pv);
        m = beta1 * m + (1.0 - beta1) * phi;
        v = beta2 * v + (1.0 - beta2) * phi * phi;
        const double denom = std::sqrt(v) + eps;
        u = (m == 0.0 && denom == 0.0) ? 0.0 : m / denom;
        if (t < burnin || batches_done == batches) continue;
        batch_sum += u;
        ++in_batch;
        ++counted;
        if (in_batch == batch_len) {
            batch_means.add(batch_sum / double(batch_len));
            batch_sum = 0.0;
            in_batch = 0;
            ++batches_done;
        }
    }
    EmaAverage out;
    out.mean = batch_means.mean;
    out.stderr_ = batch_means.stderror();
    out.batches = batches_done;
    out.samples = counted;
    out.u_final = u;
    return out;
}

struct OptimalP {
    double p_star = 0.0;
    double u_star = 0.0;
    std::size_t index = 0;
    bool boundary = false;            // argmax sits on a grid edge
    std::vector<std::size_t> ties;    // indices within tie_tol of the maximum
};

// Grid argmax of a curve u(p). The grid must be sorted with >= 3 points;
// boundary maxima are flagged rather than rejected, and near-flat curves
// report their tie set.
template <class Curve>
OptimalP find_optimal_p(Curve&& curve, const std::vector<double>& p_grid,
                        double tie_tol = 0.0) {
    if (p_grid.size() < 3)
        throw std::invalid_argument("find_optimal_p: need at least 3 grid points");
    for (std::size_t i = 1; i < p_grid.size(); ++i)
        if (!(p_grid[i] > p_grid[i - 1]))
            throw std::invalid_argument("find_optimal_p: grid must be strictly increasing");

    std::vector<double> u(p_grid.size());
    for (std::size_t i = 0; i < p_grid.size(); ++i) u[i] = curve(p_grid[i]);

    std::size_t best = 0;
    for (std::size_t i = 1; i < u.size(); ++i)
        if (u[i] > u[best]) best = i;

    OptimalP out;
    out.index = best;
    out.p_star = p_grid[best];
    out.u_star = u[best];
    out.boundary = (best == 0 || best + 1 == u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] >= u[best] - tie_tol) out.ties.push_back(i);
    return out;
}

}  // namespace gradpower

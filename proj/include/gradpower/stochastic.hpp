#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gradpower/landscapes.hpp"
#include "gradpower/noise.hpp"
#include "gradpower/rng.hpp"
#include "gradpower/stats.hpp"

namespace gradpower {

// Stochastic gradient source over a landscape. Two modes:
//  - per-coordinate: g_i = noise model centered at the true gradient entry
//    (uniform half-width or binary offset sigma, shared across coordinates);
//  - minibatch: mean gradient over b samples drawn with replacement from a
//    logistic dataset, so the noise scale goes like 1/sqrt(b).
// Tracks the empirical bound R = sup ||g||_inf + eps_R over everything it has
// sampled. Single-owner: copy the oracle per thread when parallelizing.
class StochasticGradOracle {
public:
    static StochasticGradOracle per_coordinate(const LandscapeOracle& base,
                                               NoiseKind kind, double sigma,
                                               double eps_R = 1e-8) {
        if (sigma < 0.0)
            throw std::invalid_argument("StochasticGradOracle: sigma must be >= 0");
        StochasticGradOracle o;
        o.base_ = &base;
        o.kind_ = kind;
        o.sigma_ = sigma;
        o.eps_R_ = eps_R;
        return o;
    }

    static StochasticGradOracle minibatch(const LogisticLandscape& landscape,
                                          std::size_t batch, double eps_R = 1e-8) {
        if (batch < 1) throw std::invalid_argument("StochasticGradOracle: batch must be >= 1");
        StochasticGradOracle o;
        o.base_ = &landscape.oracle;
        o.data_ = landscape.data;
        o.batch_ = batch;
        o.eps_R_ = eps_R;
        return o;
    }

    const LandscapeOracle& base() const { return *base_; }
    std::size_t dim() const { return base_->d; }
    bool is_minibatch() const { return data_ != nullptr; }
    double sigma() const { return sigma_; }
    NoiseKind kind() const { return kind_; }

    // Draws one stochastic gradient at theta into g.
    void sample(const std::vector<double>& theta, Xoshiro256pp& rng,
                std::vector<double>& g) {
        if (data_) {
            sample_minibatch(theta, rng, g);
        } else {
            base_->grad(theta, g);
            switch (kind_) {
                case NoiseKind::deterministic: break;
                case NoiseKind::uniform:
                    for (double& x : g) x += sigma_ * (2.0 * rng.uniform01() - 1.0);
                    break;
                case NoiseKind::binary:
                    for (double& x : g) x += rng.coin() ? sigma_ : -sigma_;
                    break;
            }
        }
        for (double x : g) sup_abs_ = std::max(sup_abs_, std::fabs(x));
    }

    // Empirical R = sup ||g||_inf + eps over all draws so far.
    double empirical_R() const { return sup_abs_ + eps_R_; }

    void merge_R(const StochasticGradOracle& other) {
        sup_abs_ = std::max(sup_abs_, other.sup_abs_);
    }

private:
    StochasticGradOracle() = default;

    void sample_minibatch(const std::vector<double>& theta, Xoshiro256pp& rng,
                          std::vector<double>& g) {
        const LogisticData& data = *data_;
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t k = 0; k < batch_; ++k) {
            const std::size_t i = std::size_t(rng.next() % std::uint64_t(data.n));
            const double w = -data.y[i] *
                             detail::sigmoid(-detail::logistic_margin(data, i, theta));
            const double* xi = &data.x[i * data.d];
            for (std::size_t j = 0; j < data.d; ++j) g[j] += w * xi[j];
        }
        for (double& x : g) x /= double(batch_);
    }

    const LandscapeOracle* base_ = nullptr;
    std::shared_ptr<const LogisticData> data_;
    std::size_t batch_ = 0;
    NoiseKind kind_ = NoiseKind::deterministic;
    double sigma_ = 0.0;
    double eps_R_ = 1e-8;
    double sup_abs_ = 0.0;
};

struct UnbiasednessReport {
    bool holds = true;
    double worst_z = 0.0;      // |mean - true| / stderr, worst coordinate
    std::size_t worst_coord = 0;
    long long draws = 0;
};

// Checks E[g(theta)] = grad(theta) coordinate-wise within z_tol standard
// errors over n_draws samples.
inline UnbiasednessReport check_unbiasedness(StochasticGradOracle& oracle,
                                             const std::vector<double>& theta,
                                             long long n_draws, std::uint64_t seed,
                                             double z_tol = 4.0) {
    if (n_draws < 2) throw std::invalid_argument("check_unbiasedness: n_draws must be >= 2");
    const std::size_t d = oracle.dim();
    std::vector<MeanVar> acc(d);
    std::vector<double> g(d);
    Xoshiro256pp rng(seed);
    for (long long it = 0; it < n_draws; ++it) {
        oracle.sample(theta, rng, g);
        for (std::size_t i = 0; i < d; ++i) acc[i].add(g[i]);
    }
    std::vector<double> truth = oracle.base().gradient(theta);
    UnbiasednessReport rep;
    rep.draws = n_draws;
    for (std::size_t i = 0; i < d; ++i) {
        const double se = acc[i].stderror();
        const double dev = std::fabs(acc[i].mean - truth[i]);
        // exact-coordinate case (no noise on that coordinate): dev must be 0
        const double z = se > 0.0 ? dev / se : (dev == 0.0 ? 0.0 : 1.0 / 0.0);
        if (z > rep.worst_z) {
            rep.worst_z = z;
            rep.worst_coord = i;
        }
    }
    rep.holds = rep.worst_z <= z_tol;
    return rep;
}

}  // namespace gradpower

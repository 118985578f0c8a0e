#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "gradpower/rng.hpp"

namespace gradpower {

enum class NoiseKind { deterministic, uniform, binary };

// Scalar stochastic-gradient model around a true gradient mu:
//   deterministic -> mu;  uniform -> Unif(mu - sigma, mu + sigma);
//   binary        -> mu - sigma or mu + sigma with equal probability.
struct NoiseModel {
    NoiseKind kind = NoiseKind::deterministic;
    double mu = 0.0;
    double sigma = 0.0;

    static NoiseModel deterministic(double mu) { return {NoiseKind::deterministic, mu, 0.0}; }
    static NoiseModel uniform(double mu, double sigma) {
        NoiseModel m{NoiseKind::uniform, mu, sigma};
        m.validate();
        return m;
    }
    static NoiseModel binary(double mu, double sigma) {
        NoiseModel m{NoiseKind::binary, mu, sigma};
        m.validate();
        return m;
    }

    void validate() const {
        if (!std::isfinite(mu) || !std::isfinite(sigma))
            throw std::invalid_argument("NoiseModel: non-finite parameter");
        if (sigma < 0.0)
            throw std::invalid_argument("NoiseModel: sigma must be >= 0, got " +
                                        std::to_string(sigma));
    }

    double sample(Xoshiro256pp& rng) const {
        switch (kind) {
            case NoiseKind::deterministic: return mu;
            case NoiseKind::uniform:
                if (sigma == 0.0) return mu;
                return mu - sigma + 2.0 * sigma * rng.uniform01();
            case NoiseKind::binary:
                if (sigma == 0.0) return mu;
                return rng.coin() ? mu + sigma : mu - sigma;
        }
        throw std::logic_error("NoiseModel: unreachable");
    }
};

}  // namespace gradpower

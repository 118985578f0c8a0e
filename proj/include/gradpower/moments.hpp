#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "gradpower/transform.hpp"

namespace gradpower {

namespace detail {

// Antiderivative of phi_p: |x|^{p+1}/(p+1), an even function.
inline double phi_antideriv(double x, double p) {
    return std::pow(std::fabs(x), p + 1.0) / (p + 1.0);
}

// Antiderivative of phi_p^2: sign(x)*|x|^{2p+1}/(2p+1), an odd function.
inline double phi_sq_antideriv(double x, double p) {
    return sign_power_raw(x, 2.0 * p + 1.0) / (2.0 * p + 1.0);
}

}  // namespace detail

// E[phi_p(g)] for g ~ Unif(mu - sigma, mu + sigma); sigma = 0 falls back to
// the deterministic value phi_p(mu).
inline double moment_first(double mu, double sigma, PowerExponent p) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma) || !std::isfinite(mu))
        throw std::invalid_argument("moment_first: need finite mu and sigma >= 0");
    if (sigma == 0.0) return detail::sign_power_raw(mu, p.value());
    return (detail::phi_antideriv(mu + sigma, p.value()) -
            detail::phi_antideriv(mu - sigma, p.value())) /
           (2.0 * sigma);
}

// E[phi_p^2(g)] for the same model.
inline double moment_second(double mu, double sigma, PowerExponent p) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma) || !std::isfinite(mu))
        throw std::invalid_argument("moment_second: need finite mu and sigma >= 0");
    if (sigma == 0.0) {
        const double phi = detail::sign_power_raw(mu, p.value());
        return phi * phi;
    }
    return (detail::phi_sq_antideriv(mu + sigma, p.value()) -
            detail::phi_sq_antideriv(mu - sigma, p.value())) /
           (2.0 * sigma);
}

enum class NoiseRegime { low_noise, high_noise, general };

struct LimitUpdate {
    double u = 0.0;
    NoiseRegime regime = NoiseRegime::general;
};

// Limiting Adam-style update u = E[phi_p(g)] / (sqrt(E[phi_p^2(g)]) + eps).
// Cauchy-Schwarz gives |u| <= 1 whenever eps >= 0. Regime is classified by
// sigma/|mu|: below 1 low-noise, above 1 high-noise, ambiguous -> general.
inline LimitUpdate limit_update(double mu, double sigma, PowerExponent p, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("limit_update: eps must be >= 0");
    const double m1 = moment_first(mu, sigma, p);
    const double m2 = moment_second(mu, sigma, p);
    const double denom = std::sqrt(m2) + eps;
    LimitUpdate out;
    out.u = (m1 == 0.0 && denom == 0.0) ? 0.0 : m1 / denom;
    if (sigma == 0.0)
        out.regime = NoiseRegime::low_noise;
    else if (mu == 0.0)
        out.regime = NoiseRegime::high_noise;
    else {
        const double ratio = sigma / std::fabs(mu);
        out.regime = ratio < 1.0   ? NoiseRegime::low_noise
                     : ratio > 1.0 ? NoiseRegime::high_noise
                                   : NoiseRegime::general;
    }
    return out;
}

// Low-noise surrogate for the limit update: 1/(1 + eps/mu^p), strictly
// decreasing in p when 0 < mu < 1 and eps > 0.
inline double low_noise_surrogate(double mu, PowerExponent p, double eps) {
    if (!(mu > 0.0)) throw std::invalid_argument("low_noise_surrogate: mu must be > 0");
    if (!(eps >= 0.0)) throw std::invalid_argument("low_noise_surrogate: eps must be >= 0");
    return 1.0 / (1.0 + eps / std::pow(mu, p.value()));
}

namespace detail {

inline void pstar_check_domain(double sigma, double eps) {
    if (!(sigma > 0.0 && sigma < 1.0))
        throw std::domain_error("pstar: need 0 < sigma < 1");
    if (!(eps > 0.0)) throw std::domain_error("pstar: need eps > 0");
    if (!(eps * std::log(1.0 / sigma) < 1.0))
        throw std::domain_error("pstar: condition eps*log(1/sigma) < 1 violated");
}

}  // namespace detail

// Two-sided bracket for the optimal power in the high-noise uniform model:
// ( ln(eps*ln(1/sigma)) / ln(sigma/e^3), ln(eps*ln(1/sigma)) / ln(sigma) ).
inline std::pair<double, double> pstar_bounds(double sigma, double eps) {
    detail::pstar_check_domain(sigma, eps);
    const double num = std::log(eps * std::log(1.0 / sigma));
    return {num / (std::log(sigma) - 3.0), num / std::log(sigma)};
}

// Unique root of sigma^p / (2p+1)^{3/2} = eps*log(1/sigma); the left side is
// strictly decreasing in p, so bisection on (0, 64] converges to it.
inline double pstar_root(double sigma, double eps) {
    detail::pstar_check_domain(sigma, eps);
    const double rhs = eps * std::log(1.0 / sigma);
    auto f = [&](double p) {
        return std::pow(sigma, p) / std::pow(2.0 * p + 1.0, 1.5) - rhs;
    };
    double lo = 0.0, hi = 64.0;  // f(0) = 1 - rhs > 0 by the domain condition
    if (!(f(hi) < 0.0))
        throw std::domain_error("pstar_root: root exceeds the p = 64 search cap");
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace gradpower

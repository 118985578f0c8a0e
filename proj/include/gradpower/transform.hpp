#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gradpower {

// Exponent p > 0 for the sign-power transform. p = 1 selects the exact
// identity path so power-variant optimizers reduce bitwise to their bases.
class PowerExponent {
public:
    explicit PowerExponent(double p) : p_(p) {
        if (!std::isfinite(p) || p <= 0.0)
            throw std::invalid_argument("PowerExponent: p must be finite and > 0, got " +
                                        std::to_string(p));
    }

    double value() const { return p_; }
    bool is_identity() const { return p_ == 1.0; }

private:
    double p_;
};

namespace detail {

// Hot-path core, assumes p already validated. |z|^p carries the sign of z.
// z = 0 returns exactly 0 for every p (the pow path would raise 0^p fine for
// p > 0, but the explicit branch also pins the sign of the zero).
// p = 1 returns z itself, bitwise.
inline double sign_power_raw(double z, double p) {
    if (z == 0.0) return 0.0;
    if (p == 1.0) return z;
    return std::copysign(std::pow(std::fabs(z), p), z);
}

}  // namespace detail

inline double sign_power_scalar(double z, PowerExponent p) {
    if (!std::isfinite(z))
        throw std::domain_error("sign_power_scalar: non-finite input z");
    return detail::sign_power_raw(z, p.value());
}

// Flat gradient/parameter vector. Construction rejects non-finite entries,
// so everything downstream can assume finite data.
class GradVector {
public:
    explicit GradVector(std::vector<double> values) : v_(std::move(values)) {
        if (v_.empty())
            throw std::invalid_argument("GradVector: length must be >= 1");
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (!std::isfinite(v_[i]))
                throw std::invalid_argument("GradVector: non-finite entry at index " +
                                            std::to_string(i));
    }

    // For producers that have already established finiteness.
    static GradVector unchecked(std::vector<double> values) {
        GradVector g;
        g.v_ = std::move(values);
        return g;
    }

    const std::vector<double>& values() const { return v_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }

private:
    GradVector() = default;
    std::vector<double> v_;
};

inline GradVector sign_power_vec(const GradVector& g, PowerExponent p) {
    if (p.is_identity()) return GradVector::unchecked(g.values());
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[i] = detail::sign_power_raw(g[i], p.value());
        if (!std::isfinite(out[i]))
            throw std::domain_error("sign_power_vec: non-finite result at index " +
                                    std::to_string(i));
    }
    return GradVector::unchecked(std::move(out));
}

}  // namespace gradpower

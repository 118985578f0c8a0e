#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradpower/transform.hpp"

namespace gradpower {

// Raised when an update produces a non-finite parameter or state entry; the
// harness catches it and truncates the trajectory with a diagnostic record.
struct DivergenceError : std::runtime_error {
    long step;
    std::size_t index;
    DivergenceError(long step_, std::size_t index_)
        : std::runtime_error("divergence at step " + std::to_string(step_) +
                             ", coordinate " + std::to_string(index_)),
          step(step_), index(index_) {}
};

enum class ClipMode { before_power, after_power, none };

// Returns g unchanged (bitwise) when ||g||2 <= threshold, else g scaled onto
// the threshold sphere.
inline void clip_global_norm_inplace(std::vector<double>& g, double threshold) {
    if (!(threshold > 0.0))
        throw std::invalid_argument("clip_global_norm: threshold must be > 0");
    double sq = 0.0;
    for (double x : g) sq += x * x;
    const double norm = std::sqrt(sq);
    if (norm <= threshold) return;
    const double scale = threshold / norm;
    for (double& x : g) x *= scale;
}

inline GradVector clip_global_norm(const GradVector& g, double threshold) {
    std::vector<double> v = g.values();
    clip_global_norm_inplace(v, threshold);
    return GradVector::unchecked(std::move(v));
}

namespace detail {

inline void check_dims(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
}

inline void apply_power_inplace(std::vector<double>& g, double p) {
    if (p == 1.0) return;
    for (double& x : g) x = detail::sign_power_raw(x, p);
}

struct ScalarLr {
    double lr;
    double operator()(std::size_t) const { return lr; }
};

struct VectorLr {
    const std::vector<double>* lr;
    double operator()(std::size_t i) const { return (*lr)[i]; }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Adam / AdamPower (decoupled weight decay)

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.95;
    double eps = 1e-8;
    double weight_decay = 0.0;
    double p = 1.0;
    std::optional<double> clip_threshold;
    ClipMode clip_mode = ClipMode::before_power;

    void validate() const {
        if (!(beta1 >= 0.0 && beta1 < 1.0))
            throw std::invalid_argument("AdamConfig: beta1 must be in [0, 1)");
        if (!(beta2 >= 0.0 && beta2 < 1.0))
            throw std::invalid_argument("AdamConfig: beta2 must be in [0, 1)");
        // eps = 0 is allowed so the exact scale-invariance property is testable;
        // anything negative or non-finite is rejected.
        if (!(eps >= 0.0) || !std::isfinite(eps))
            throw std::invalid_argument("AdamConfig: eps must be >= 0 and finite");
        if (!(weight_decay >= 0.0))
            throw std::invalid_argument("AdamConfig: weight_decay must be >= 0");
        PowerExponent check_p(p);
        if (clip_threshold && !(*clip_threshold > 0.0))
            throw std::invalid_argument("AdamConfig: clip_threshold must be > 0");
    }
};

struct AdamState {
    std::vector<double> m, v;
    long t = 0;

    static AdamState zeros(std::size_t d) {
        AdamState s;
        s.m.assign(d, 0.0);
        s.v.assign(d, 0.0);
        return s;
    }
};

namespace detail {

// Shared Adam arithmetic on an already-transformed gradient. Both the plain
// and the power variant funnel through here, which is what makes the p = 1
// reduction bitwise rather than merely approximate.
template <class LrAt>
void adam_core(AdamState& s, std::vector<double>& theta, const std::vector<double>& g,
               const AdamConfig& cfg, LrAt lr_at) {
    check_dims(theta.size(), g.size(), "adam step");
    check_dims(theta.size(), s.m.size(), "adam step state");
    ++s.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, double(s.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, double(s.t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        s.m[i] = cfg.beta1 * s.m[i] + (1.0 - cfg.beta1) * g[i];
        s.v[i] = cfg.beta2 * s.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        const double mhat = s.m[i] / bc1;
        const double vhat = s.v[i] / bc2;
        const double denom = std::sqrt(vhat) + cfg.eps;
        const double adaptive = (mhat == 0.0 && denom == 0.0) ? 0.0 : mhat / denom;
        theta[i] -= lr_at(i) * (adaptive + cfg.weight_decay * theta[i]);
        if (!std::isfinite(theta[i]) || !std::isfinite(s.m[i]) || !std::isfinite(s.v[i]))
            throw DivergenceError(s.t, i);
    }
}

template <class LrAt>
void adampower_step_impl(AdamState& s, std::vector<double>& theta,
                         std::vector<double> g, const AdamConfig& cfg, LrAt lr_at,
                         bool powered) {
    const bool clip = cfg.clip_threshold.has_value() && cfg.clip_mode != ClipMode::none;
    if (clip && (!powered || cfg.clip_mode == ClipMode::before_power))
        clip_global_norm_inplace(g, *cfg.clip_threshold);
    if (powered) apply_power_inplace(g, cfg.p);
    if (clip && powered && cfg.clip_mode == ClipMode::after_power)
        clip_global_norm_inplace(g, *cfg.clip_threshold);
    adam_core(s, theta, g, cfg, lr_at);
}

}  // namespace detail

// Plain Adam (ignores cfg.p).
inline void adam_step(AdamState& s, std::vector<double>& theta, std::vector<double> g,
                      const AdamConfig& cfg, double lr) {
    detail::adampower_step_impl(s, theta, std::move(g), cfg, detail::ScalarLr{lr}, false);
}

inline void adampower_step(AdamState& s, std::vector<double>& theta, std::vector<double> g,
                           const AdamConfig& cfg, double lr) {
    detail::adampower_step_impl(s, theta, std::move(g), cfg, detail::ScalarLr{lr}, true);
}

// Per-coordinate learning rates (blockwise-LR composition).
inline void adampower_step(AdamState& s, std::vector<double>& theta, std::vector<double> g,
                           const AdamConfig& cfg, const std::vector<double>& lr_per_coord) {
    detail::check_dims(theta.size(), lr_per_coord.size(), "adampower per-coordinate lr");
    detail::adampower_step_impl(s, theta, std::move(g), cfg,
                                detail::VectorLr{&lr_per_coord}, true);
}

// ---------------------------------------------------------------------------
// Adagrad / AdagradPower. Note the stabilizer sits INSIDE the square root
// here, unlike Adam's sqrt(v) + eps.

struct AdagradState {
    std::vector<double> v;
    long t = 0;

    static AdagradState zeros(std::size_t d) {
        AdagradState s;
        s.v.assign(d, 0.0);
        return s;
    }
};

namespace detail {

inline void adagrad_core(AdagradState& s, std::vector<double>& theta,
                         const std::vector<double>& g, double lr, double eps) {
    check_dims(theta.size(), g.size(), "adagrad step");
    check_dims(theta.size(), s.v.size(), "adagrad step state");
    ++s.t;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        s.v[i] += g[i] * g[i];
        const double denom = std::sqrt(s.v[i] + eps);
        if (g[i] != 0.0) theta[i] -= lr * g[i] / denom;
        if (!std::isfinite(theta[i]) || !std::isfinite(s.v[i]))
            throw DivergenceError(s.t, i);
    }
}

}  // namespace detail

inline void adagrad_step(AdagradState& s, std::vector<double>& theta,
                         const std::vector<double>& g, double lr, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("adagrad_step: eps must be >= 0");
    detail::adagrad_core(s, theta, g, lr, eps);
}

inline void adagradpower_step(AdagradState& s, std::vector<double>& theta,
                              std::vector<double> g, PowerExponent p, double lr,
                              double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("adagradpower_step: eps must be >= 0");
    detail::apply_power_inplace(g, p.value());
    detail::adagrad_core(s, theta, g, lr, eps);
}

// ---------------------------------------------------------------------------
// SGD / SGDPower with momentum buffer and decoupled weight decay.

struct SgdState {
    std::vector<double> buffer;

    static SgdState zeros(std::size_t d) {
        SgdState s;
        s.buffer.assign(d, 0.0);
        return s;
    }
};

namespace detail {

inline void sgd_core(SgdState& s, std::vector<double>& theta,
                     const std::vector<double>& g, double lr, double momentum,
                     double weight_decay) {
    check_dims(theta.size(), g.size(), "sgd step");
    check_dims(theta.size(), s.buffer.size(), "sgd step state");
    for (std::size_t i = 0; i < theta.size(); ++i) {
        s.buffer[i] = momentum * s.buffer[i] + g[i];
        theta[i] -= lr * (s.buffer[i] + weight_decay * theta[i]);
        if (!std::isfinite(theta[i]) || !std::isfinite(s.buffer[i]))
            throw DivergenceError(0, i);
    }
}

}  // namespace detail

inline void sgd_step(SgdState& s, std::vector<double>& theta, const std::vector<double>& g,
                     double lr, double momentum, double weight_decay) {
    if (!(momentum >= 0.0 && momentum < 1.0))
        throw std::invalid_argument("sgd_step: momentum must be in [0, 1)");
    detail::sgd_core(s, theta, g, lr, momentum, weight_decay);
}

inline void sgdpower_step(SgdState& s, std::vector<double>& theta, std::vector<double> g,
                          PowerExponent p, double lr, double momentum,
                          double weight_decay) {
    if (!(momentum >= 0.0 && momentum < 1.0))
        throw std::invalid_argument("sgdpower_step: momentum must be in [0, 1)");
    detail::apply_power_inplace(g, p.value());
    detail::sgd_core(s, theta, g, lr, momentum, weight_decay);
}

// ---------------------------------------------------------------------------
// Sign momentum: theta <- theta - lr*(sign(m) + wd*theta). Exists for the
// linear-transform invariance property (the update direction is exactly
// scale-free), not as a tuned optimizer.

struct SignMomentumState {
    std::vector<double> m;

    static SignMomentumState zeros(std::size_t d) {
        SignMomentumState s;
        s.m.assign(d, 0.0);
        return s;
    }
};

inline void signmomentum_step(SignMomentumState& s, std::vector<double>& theta,
                              const std::vector<double>& g, double beta, double lr,
                              double weight_decay) {
    detail::check_dims(theta.size(), g.size(), "signmomentum step");
    detail::check_dims(theta.size(), s.m.size(), "signmomentum step state");
    for (std::size_t i = 0; i < theta.size(); ++i) {
        s.m[i] = beta * s.m[i] + (1.0 - beta) * g[i];
        const double dir = s.m[i] > 0.0 ? 1.0 : (s.m[i] < 0.0 ? -1.0 : 0.0);
        theta[i] -= lr * (dir + weight_decay * theta[i]);
        if (!std::isfinite(theta[i])) throw DivergenceError(0, i);
    }
}

// ---------------------------------------------------------------------------
// Parameter groups with blockwise learning-rate multipliers.

struct ParamGroup {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive
    double lr_multiplier = 1.0;
};

// Expands group multipliers into a per-coordinate lr vector. The groups must
// partition [0, d) exactly; gaps and overlaps are configuration errors.
inline std::vector<double> apply_param_groups(std::vector<ParamGroup> groups,
                                              std::size_t d, double base_lr) {
    if (groups.empty())
        throw std::invalid_argument("apply_param_groups: no groups given");
    std::sort(groups.begin(), groups.end(),
              [](const ParamGroup& a, const ParamGroup& b) { return a.begin < b.begin; });
    std::size_t expected = 0;
    for (const auto& g : groups) {
        if (g.begin != expected || g.end <= g.begin || g.end > d)
            throw std::invalid_argument(
                "apply_param_groups: groups must partition the parameter vector "
                "(problem at coordinate " + std::to_string(expected) + ")");
        if (!(g.lr_multiplier > 0.0))
            throw std::invalid_argument("apply_param_groups: multipliers must be > 0");
        expected = g.end;
    }
    if (expected != d)
        throw std::invalid_argument(
            "apply_param_groups: coordinates [" + std::to_string(expected) + ", " +
            std::to_string(d) + ") not covered by any group");
    std::vector<double> lr(d);
    for (const auto& g : groups)
        for (std::size_t i = g.begin; i < g.end; ++i) lr[i] = base_lr * g.lr_multiplier;
    return lr;
}

}  // namespace gradpower

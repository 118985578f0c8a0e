#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradpower/optim.hpp"
#include "gradpower/transform.hpp"

namespace gradpower {

// Small dense row-major matrix; enough linear algebra for the Newton-Schulz
// iteration on desk-scale parameter blocks.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {
        if (r == 0 || c == 0) throw std::invalid_argument("Mat: zero dimension");
    }

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    double frobenius() const {
        double sq = 0.0;
        for (double x : a) sq += x * x;
        return std::sqrt(sq);
    }
};

namespace detail {

inline Mat matmul(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matmul: shape mismatch");
    Mat out(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            const double xik = x.at(i, k);
            if (xik == 0.0) continue;
            for (std::size_t j = 0; j < y.cols; ++j)
                out.at(i, j) += xik * y.at(k, j);
        }
    return out;
}

inline Mat mat_aat(const Mat& x) {  // X * X^T
    Mat out(x.rows, x.rows);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < x.cols; ++k) s += x.at(i, k) * x.at(j, k);
            out.at(i, j) = s;
            out.at(j, i) = s;
        }
    return out;
}

}  // namespace detail

inline constexpr std::array<double, 3> kNewtonSchulzCoeffs{3.4445, -4.7750, 2.0315};

// Frobenius-normalizes M, then iterates X <- aX + b(XX^T)X + c(XX^T)^2 X.
// With the default quintic coefficients and 5 iterations, singular values land
// in [0.68, 1.2] for inputs whose singular-value ratio is <= 1e3.
inline Mat newton_schulz_orthogonalize(const Mat& m, int iters = 5,
                                       std::array<double, 3> coeffs = kNewtonSchulzCoeffs) {
    if (iters < 1) throw std::invalid_argument("newton_schulz_orthogonalize: iters must be >= 1");
    const double fnorm = m.frobenius();
    if (fnorm == 0.0)
        throw std::domain_error("newton_schulz_orthogonalize: zero matrix");
    Mat x = m;
    for (double& v : x.a) v /= fnorm;
    const double a = coeffs[0], b = coeffs[1], c = coeffs[2];
    for (int it = 0; it < iters; ++it) {
        const Mat xxT = detail::mat_aat(x);
        const Mat xxT2 = detail::matmul(xxT, xxT);
        Mat poly(x.rows, x.rows);  // bA + cA^2
        for (std::size_t i = 0; i < poly.a.size(); ++i)
            poly.a[i] = b * xxT.a[i] + c * xxT2.a[i];
        Mat px = detail::matmul(poly, x);
        for (std::size_t i = 0; i < x.a.size(); ++i)
            x.a[i] = a * x.a[i] + px.a[i];
    }
    return x;
}

enum class MuonScaleMode { rms_adjusted, none };

struct MuonConfig {
    double momentum = 0.95;
    double p = 1.0;
    int ns_iters = 5;
    std::array<double, 3> ns_coeffs = kNewtonSchulzCoeffs;
    double weight_decay = 0.0;
    MuonScaleMode scale_mode = MuonScaleMode::rms_adjusted;

    void validate() const {
        if (!(momentum >= 0.0 && momentum < 1.0))
            throw std::invalid_argument("MuonConfig: momentum must be in [0, 1)");
        if (ns_iters < 1) throw std::invalid_argument("MuonConfig: ns_iters must be >= 1");
        if (!(weight_decay >= 0.0))
            throw std::invalid_argument("MuonConfig: weight_decay must be >= 0");
        PowerExponent check_p(p);
    }
};

struct MuonState {
    Mat buffer;
    long t = 0;

    static MuonState zeros(std::size_t rows, std::size_t cols) {
        MuonState s;
        s.buffer = Mat(rows, cols);
        return s;
    }
};

namespace detail {

inline void muon_core(MuonState& s, Mat& theta, const Mat& g, const MuonConfig& cfg,
                      double lr) {
    if (theta.rows != g.rows || theta.cols != g.cols)
        throw std::invalid_argument("muon step: parameter/gradient shape mismatch");
    if (s.buffer.rows != theta.rows || s.buffer.cols != theta.cols)
        throw std::invalid_argument("muon step: state shape mismatch");
    ++s.t;
    for (std::size_t i = 0; i < s.buffer.a.size(); ++i)
        s.buffer.a[i] = cfg.momentum * s.buffer.a[i] + g.a[i];

    Mat update(theta.rows, theta.cols);
    bool buffer_zero = true;
    for (double v : s.buffer.a)
        if (v != 0.0) { buffer_zero = false; break; }
    if (!buffer_zero) {
        update = newton_schulz_orthogonalize(s.buffer, cfg.ns_iters, cfg.ns_coeffs);
        if (cfg.scale_mode == MuonScaleMode::rms_adjusted) {
            const double scale =
                0.2 * std::sqrt(double(std::max(theta.rows, theta.cols)));
            for (double& v : update.a) v *= scale;
        }
    }
    for (std::size_t i = 0; i < theta.a.size(); ++i) {
        theta.a[i] -= lr * (update.a[i] + cfg.weight_decay * theta.a[i]);
        if (!std::isfinite(theta.a[i]) || !std::isfinite(s.buffer.a[i]))
            throw DivergenceError(s.t, i);
    }
}

inline Mat apply_power(const Mat& g, double p) {
    if (p == 1.0) return g;
    Mat out = g;
    for (double& v : out.a) v = sign_power_raw(v, p);
    return out;
}

}  // namespace detail

// Muon baseline: momentum buffer, Newton-Schulz orthogonalization, optional
// rms-adjusted scale, decoupled weight decay.
inline void muon_step(MuonState& s, Mat& theta, const Mat& g, const MuonConfig& cfg,
                      double lr) {
    detail::muon_core(s, theta, g, cfg, lr);
}

// MuonPower: the transform is applied to the raw gradient, before momentum
// accumulation (mirroring where the Adam variant powers its gradient); the
// post-momentum alternative is not implemented.
inline void muonpower_step(MuonState& s, Mat& theta, const Mat& g, const MuonConfig& cfg,
                           double lr) {
    detail::muon_core(s, theta, detail::apply_power(g, cfg.p), cfg, lr);
}

}  // namespace gradpower

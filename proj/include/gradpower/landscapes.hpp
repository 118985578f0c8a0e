#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradpower/rng.hpp"

namespace gradpower {

// Differentiable test objective with analytic gradient, a smoothness constant
// where one is known, a lower bound, and a default starting point.
struct LandscapeOracle {
    std::string name;
    std::size_t d = 0;
    std::function<double(const std::vector<double>&)> loss;
    std::function<void(const std::vector<double>&, std::vector<double>&)> grad;
    std::optional<double> smoothness;  // H, analytic where known
    double lower_bound = 0.0;          // L*
    std::vector<double> init;

    std::vector<double> gradient(const std::vector<double>& theta) const {
        std::vector<double> g(d);
        grad(theta, g);
        return g;
    }
};

namespace detail {

inline double softplus(double x) {
    // log(1 + e^x) without overflow on either tail
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace detail

// Quadratic bowl of curvature H_sharp on the first d_sharp coordinates plus a
// softplus-smoothed downhill run on the d_flat remaining ones:
//   L = 1/2 H_sharp ||th_s||^2 + 2*slope*sum_i softplus(-th_f[i]).
// The flat-block gradient at the origin is -slope per coordinate, decaying to
// 0 as coordinates move out; curvature never exceeds max(H_sharp, slope/2).
inline LandscapeOracle make_river_valley(std::size_t d_sharp, std::size_t d_flat,
                                         double h_sharp, double slope) {
    if (d_sharp < 1 || d_flat < 1)
        throw std::invalid_argument("make_river_valley: both blocks need dimension >= 1");
    if (!(h_sharp >= 0.0) || !(slope > 0.0))
        throw std::invalid_argument("make_river_valley: need h_sharp >= 0 and slope > 0");
    LandscapeOracle o;
    o.name = "river_valley";
    o.d = d_sharp + d_flat;
    o.loss = [d_sharp, h_sharp, slope](const std::vector<double>& th) {
        double sharp = 0.0;
        for (std::size_t i = 0; i < d_sharp; ++i) sharp += th[i] * th[i];
        double flat = 0.0;
        for (std::size_t i = d_sharp; i < th.size(); ++i)
            flat += detail::softplus(-th[i]);
        return 0.5 * h_sharp * sharp + 2.0 * slope * flat;
    };
    o.grad = [d_sharp, h_sharp, slope](const std::vector<double>& th,
                                       std::vector<double>& g) {
        for (std::size_t i = 0; i < d_sharp; ++i) g[i] = h_sharp * th[i];
        for (std::size_t i = d_sharp; i < th.size(); ++i)
            g[i] = -2.0 * slope * detail::sigmoid(-th[i]);
    };
    o.smoothness = std::max(h_sharp, 0.5 * slope);
    o.lower_bound = 0.0;
    o.init.assign(o.d, 0.0);
    return o;
}

struct LogisticData {
    std::size_t d = 0, n = 0;
    std::vector<double> x;  // n x d, row-major
    std::vector<double> y;  // labels in {-1, +1}
};

struct LogisticLandscape {
    LandscapeOracle oracle;
    std::shared_ptr<const LogisticData> data;
};

namespace detail {

inline double logistic_margin(const LogisticData& data, std::size_t row,
                              const std::vector<double>& theta) {
    double m = 0.0;
    const double* xi = &data.x[row * data.d];
    for (std::size_t j = 0; j < data.d; ++j) m += xi[j] * theta[j];
    return data.y[row] * m;
}

// lambda_max of X^T X / n by power iteration (deterministic start).
inline double logistic_lambda_max(const LogisticData& data) {
    std::vector<double> v(data.d, 1.0 / std::sqrt(double(data.d)));
    std::vector<double> xv(data.n), w(data.d);
    double lambda = 0.0;
    for (int it = 0; it < 2000; ++it) {
        for (std::size_t i = 0; i < data.n; ++i) {
            double s = 0.0;
            const double* xi = &data.x[i * data.d];
            for (std::size_t j = 0; j < data.d; ++j) s += xi[j] * v[j];
            xv[i] = s;
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < data.n; ++i) {
            const double* xi = &data.x[i * data.d];
            for (std::size_t j = 0; j < data.d; ++j) w[j] += xi[j] * xv[i];
        }
        double norm = 0.0;
        for (std::size_t j = 0; j < data.d; ++j) {
            w[j] /= double(data.n);
            norm += w[j] * w[j];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        const double next = norm;
        for (std::size_t j = 0; j < data.d; ++j) v[j] = w[j] / norm;
        if (it > 10 && std::fabs(next - lambda) <= 1e-13 * next) { lambda = next; break; }
        lambda = next;
    }
    return lambda;
}

}  // namespace detail

// Synthetic logistic regression: Gaussian features, labels from a fixed
// ground-truth direction with optional flips. Loss at the origin is ln 2;
// H = lambda_max(X^T X)/(4n).
inline LogisticLandscape make_logistic(std::size_t d, std::size_t n_samples,
                                       std::uint64_t seed, double feature_scale = 1.0,
                                       double label_flip = 0.0) {
    if (d < 1 || n_samples < 2)
        throw std::invalid_argument("make_logistic: need d >= 1 and n_samples >= 2");
    if (!(feature_scale > 0.0) || !(label_flip >= 0.0 && label_flip < 1.0))
        throw std::invalid_argument("make_logistic: bad feature_scale or label_flip");
    auto data = std::make_shared<LogisticData>();
    data->d = d;
    data->n = n_samples;
    data->x.resize(d * n_samples);
    data->y.resize(n_samples);

    Xoshiro256pp rng(stream_seed(seed, 0x1061157ull));
    std::vector<double> truth(d);
    double tn = 0.0;
    for (auto& t : truth) { t = standard_normal(rng); tn += t * t; }
    tn = std::sqrt(tn);
    for (auto& t : truth) t /= tn;
    for (std::size_t i = 0; i < n_samples; ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double xij = feature_scale * standard_normal(rng);
            data->x[i * d + j] = xij;
            m += xij * truth[j];
        }
        double label = m >= 0.0 ? 1.0 : -1.0;
        if (label_flip > 0.0 && rng.uniform01() < label_flip) label = -label;
        data->y[i] = label;
    }

    LogisticLandscape out;
    out.data = data;
    LandscapeOracle& o = out.oracle;
    o.name = "logistic";
    o.d = d;
    auto dp = data;
    o.loss = [dp](const std::vector<double>& th) {
        double total = 0.0;
        for (std::size_t i = 0; i < dp->n; ++i)
            total += detail::softplus(-detail::logistic_margin(*dp, i, th));
        return total / double(dp->n);
    };
    o.grad = [dp](const std::vector<double>& th, std::vector<double>& g) {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < dp->n; ++i) {
            const double w = -dp->y[i] * detail::sigmoid(-detail::logistic_margin(*dp, i, th));
            const double* xi = &dp->x[i * dp->d];
            for (std::size_t j = 0; j < dp->d; ++j) g[j] += w * xi[j];
        }
        for (std::size_t j = 0; j < dp->d; ++j) g[j] /= double(dp->n);
    };
    o.smoothness = 0.25 * detail::logistic_lambda_max(*data);
    o.lower_bound = 0.0;
    o.init.assign(d, 0.0);
    return out;
}

// Chained Rosenbrock: sum_i 100(th[i+1] - th[i]^2)^2 + (1 - th[i])^2.
// Global minimum at all-ones; no global smoothness constant exists.
inline LandscapeOracle make_rosenbrock(std::size_t d) {
    if (d < 2) throw std::invalid_argument("make_rosenbrock: need d >= 2");
    LandscapeOracle o;
    o.name = "rosenbrock";
    o.d = d;
    o.loss = [](const std::vector<double>& th) {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < th.size(); ++i) {
            const double a = th[i + 1] - th[i] * th[i];
            const double b = 1.0 - th[i];
            total += 100.0 * a * a + b * b;
        }
        return total;
    };
    o.grad = [](const std::vector<double>& th, std::vector<double>& g) {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i + 1 < th.size(); ++i) {
            const double a = th[i + 1] - th[i] * th[i];
            g[i] += -400.0 * a * th[i] - 2.0 * (1.0 - th[i]);
            g[i + 1] += 200.0 * a;
        }
    };
    o.smoothness = std::nullopt;
    o.lower_bound = 0.0;
    o.init.assign(d, 1.0);
    for (std::size_t i = 0; i < d; i += 2) o.init[i] = -1.2;
    return o;
}

struct FiniteDiffReport {
    double max_rel_err = 0.0;
    std::size_t worst_point = 0;
    std::size_t worst_coord = 0;
    int points = 0;
};

// Central differences with h = 1e-6 * max(1, |th_i|) at random points in
// [-2, 2]^d around the default init; relative error uses max(|g|, 1) as the
// denominator so near-zero coordinates compare absolutely.
inline FiniteDiffReport check_gradient_fd(const LandscapeOracle& o, int n_points,
                                          std::uint64_t seed) {
    if (n_points < 1) throw std::invalid_argument("check_gradient_fd: n_points >= 1");
    Xoshiro256pp rng(seed);
    FiniteDiffReport rep;
    rep.points = n_points;
    std::vector<double> theta(o.d), g(o.d);
    for (int pt = 0; pt < n_points; ++pt) {
        for (std::size_t i = 0; i < o.d; ++i)
            theta[i] = o.init[i] + rng.uniform(-2.0, 2.0);
        o.grad(theta, g);
        for (std::size_t i = 0; i < o.d; ++i) {
            const double h = 1e-6 * std::max(1.0, std::fabs(theta[i]));
            const double saved = theta[i];
            theta[i] = saved + h;
            const double fp = o.loss(theta);
            theta[i] = saved - h;
            const double fm = o.loss(theta);
            theta[i] = saved;
            const double fd = (fp - fm) / (2.0 * h);
            const double rel = std::fabs(fd - g[i]) / std::max(std::fabs(g[i]), 1.0);
            if (rel > rep.max_rel_err) {
                rep.max_rel_err = rel;
                rep.worst_point = std::size_t(pt);
                rep.worst_coord = i;
            }
        }
    }
    return rep;
}

}  // namespace gradpower

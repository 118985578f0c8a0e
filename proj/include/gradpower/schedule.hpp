#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gradpower {

enum class ScheduleKind { constant, cos, wsd };

// Learning-rate schedule. Warmup is linear with lr(W) = lr_max exactly
// (step index starts at 1). wsd holds lr_max through step floor(
// stable_fraction * T), then decays linearly to lr_min at T.
struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::constant;
    long total_steps = 1;
    long warmup_steps = 0;
    double lr_max = 1.0;
    double lr_min = 0.0;
    double stable_fraction = 0.8;

    long stable_end() const {
        return static_cast<long>(std::floor(stable_fraction * double(total_steps)));
    }

    void validate() const {
        if (total_steps < 1)
            throw std::invalid_argument("ScheduleSpec: total_steps must be >= 1");
        if (warmup_steps < 0 || warmup_steps >= total_steps)
            throw std::invalid_argument("ScheduleSpec: need 0 <= warmup_steps < total_steps");
        if (!(lr_max > 0.0) || !std::isfinite(lr_max))
            throw std::invalid_argument("ScheduleSpec: lr_max must be positive");
        if (!(lr_min >= 0.0) || !(lr_min <= lr_max))
            throw std::invalid_argument("ScheduleSpec: need 0 <= lr_min <= lr_max");
        if (kind == ScheduleKind::wsd) {
            if (!(stable_fraction > 0.0) || !(stable_fraction <= 1.0))
                throw std::invalid_argument("ScheduleSpec: stable_fraction must be in (0, 1]");
            if (stable_end() < warmup_steps)
                throw std::invalid_argument(
                    "ScheduleSpec: wsd stable phase ends before warmup completes");
        }
    }
};

inline double schedule_lr(const ScheduleSpec& spec, long t) {
    if (t < 1 || t > spec.total_steps)
        throw std::domain_error("schedule_lr: step " + std::to_string(t) +
                                " outside [1, " + std::to_string(spec.total_steps) + "]");
    if (t <= spec.warmup_steps)
        return double(t) / double(spec.warmup_steps) * spec.lr_max;

    switch (spec.kind) {
        case ScheduleKind::constant:
            return spec.lr_max;
        case ScheduleKind::cos: {
            const double progress = double(t - spec.warmup_steps) /
                                    double(spec.total_steps - spec.warmup_steps);
            return spec.lr_min + 0.5 * (spec.lr_max - spec.lr_min) *
                                     (1.0 + std::cos(std::numbers::pi * progress));
        }
        case ScheduleKind::wsd: {
            const long s = spec.stable_end();
            if (t <= s) return spec.lr_max;
            return spec.lr_max + double(t - s) / double(spec.total_steps - s) *
                                     (spec.lr_min - spec.lr_max);
        }
    }
    throw std::logic_error("schedule_lr: unreachable");
}

}  // namespace gradpower

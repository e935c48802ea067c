#pragma once

#include <cmath>
#include <limits>

#include "dgen/core.hpp"

namespace dgen {

// Per-objective achievement score. Linear below the target, saturating
// exponential above it:
//   s(r) = alpha * (r - 1)                          r <= 1
//   s(r) = (alpha / beta) * (1 - exp(beta * (1-r))) r >  1
// Strictly increasing, C1 at r = 1 (both branches have slope alpha),
// range (-alpha, alpha/beta).
inline double achievement_score(double r, double alpha, double beta) {
    if (!(r > 0.0)) throw domain_error("achievement ratio must be positive");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw domain_error("alpha and beta must be positive");
    if (r <= 1.0) return alpha * (r - 1.0);
    return (alpha / beta) * (1.0 - std::exp(beta * (1.0 - r)));
}

inline double achievement_score_slope(double r, double alpha, double beta) {
    if (!(r > 0.0)) throw domain_error("achievement ratio must be positive");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw domain_error("alpha and beta must be positive");
    if (r <= 1.0) return alpha;
    return alpha * std::exp(beta * (1.0 - r));
}

struct AchievementScores {
    Matrix per_objective;   // n x T, s_{i,k}
    Vector dtai;            // n, each in [0, 1)
    Matrix grad_wrt_ratio;  // n x T, d(dtai_i)/d(r_{i,k})
};

// Aggregates per-objective scores into the design target achievement
// index: dtai_i = (sum_k s_{i,k} - s_min) / (s_max - s_min), with
// s_min = -sum alpha, s_max = sum alpha/beta. The exponential branch
// underflows for huge ratios, so values are clamped back into [0, 1)
// and slopes floored at the smallest normal double.
inline AchievementScores dtai_score(const RatioMatrix& ratios, const TargetSpec& targets) {
    targets.validate();
    const int n = static_cast<int>(ratios.values.rows());
    const int t_count = targets.objective_count();
    if (ratios.values.cols() != t_count) {
        throw dimension_error("ratio matrix width must equal objective count");
    }

    const double s_min = -targets.alpha.sum();
    const double s_max = (targets.alpha.array() / targets.beta.array()).sum();
    const double span = s_max - s_min;

    AchievementScores out;
    out.per_objective.resize(n, t_count);
    out.dtai.resize(n);
    out.grad_wrt_ratio.resize(n, t_count);

    constexpr double dtai_sup = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    constexpr double slope_floor = std::numeric_limits<double>::min();

    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int k = 0; k < t_count; ++k) {
            const double r = ratios.values(i, k);
            const double a = targets.alpha[k];
            const double b = targets.beta[k];
            const double s = achievement_score(r, a, b);
            out.per_objective(i, k) = s;
            sum += s;
            out.grad_wrt_ratio(i, k) =
                std::max(achievement_score_slope(r, a, b) / span, slope_floor);
        }
        out.dtai[i] = std::clamp((sum - s_min) / span, 0.0, dtai_sup);
    }
    return out;
}

// Chain rule through the ratio: maximize -> dr/dp = 1/t, minimize ->
// r = t/p so dr/dp = -t/p^2.
inline Matrix dtai_grad_wrt_performance(const AchievementScores& scores,
                                        const RatioMatrix& ratios,
                                        const TargetSpec& targets,
                                        const Matrix& perf) {
    const int n = static_cast<int>(perf.rows());
    const int t_count = targets.objective_count();
    if (scores.grad_wrt_ratio.rows() != n || scores.grad_wrt_ratio.cols() != t_count ||
        ratios.values.rows() != n || perf.cols() != t_count) {
        throw dimension_error("dtai gradient inputs disagree in shape");
    }
    Matrix grad(n, t_count);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < t_count; ++k) {
            const double dr_dp = targets.directions[k] == Direction::maximize
                                     ? 1.0 / targets.t[k]
                                     : -targets.t[k] / (perf(i, k) * perf(i, k));
            grad(i, k) = scores.grad_wrt_ratio(i, k) * dr_dp;
        }
    }
    return grad;
}

} // namespace dgen

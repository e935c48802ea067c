#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgen/errors.hpp"

namespace dgen {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Direction { maximize, minimize };

inline std::string to_string(Direction d) {
    return d == Direction::maximize ? "maximize" : "minimize";
}

inline Direction direction_from_string(const std::string& s) {
    if (s == "maximize") return Direction::maximize;
    if (s == "minimize") return Direction::minimize;
    throw schema_error("unknown direction '" + s + "' (expected maximize|minimize)");
}

struct ObjectiveSpec {
    std::string name;
    Direction direction = Direction::maximize;
};

// One design variable. Continuous variables occupy a single encoded
// column; categoricals occupy one column per level (one-hot).
struct DesignVariable {
    enum class Kind { continuous, categorical };
    Kind kind = Kind::continuous;
    std::string name;
    double lo = 0.0, hi = 0.0;        // observed bounds, filled at load
    std::vector<std::string> levels;  // categorical only

    int width() const {
        return kind == Kind::continuous ? 1 : static_cast<int>(levels.size());
    }
};

struct DataSchema {
    std::vector<DesignVariable> design;
    std::vector<ObjectiveSpec> performance;
    std::string feasibility_column;

    int encoded_width() const {
        int d = 0;
        for (const auto& v : design) d += v.width();
        return d;
    }
    int objective_count() const { return static_cast<int>(performance.size()); }

    // Encoded column index where each variable's block starts.
    std::vector<int> column_offsets() const {
        std::vector<int> off;
        off.reserve(design.size());
        int at = 0;
        for (const auto& v : design) {
            off.push_back(at);
            at += v.width();
        }
        return off;
    }
};

struct Dataset {
    DataSchema schema;
    Matrix designs;       // n x D, raw units, categoricals one-hot
    Matrix performances;  // n x T, raw units
    std::vector<std::uint8_t> feasible;

    int n_rows() const { return static_cast<int>(designs.rows()); }
    int encoded_width() const { return static_cast<int>(designs.cols()); }
    int objective_count() const { return static_cast<int>(performances.cols()); }

    void validate() const {
        if (n_rows() < 2) throw validation_error("dataset needs at least 2 rows");
        if (objective_count() < 1) throw validation_error("dataset needs at least 1 objective");
        if (performances.rows() != designs.rows() ||
            static_cast<int>(feasible.size()) != n_rows()) {
            throw dimension_error("dataset row counts disagree");
        }
        if (!designs.allFinite() || !performances.allFinite()) {
            throw validation_error("dataset contains non-finite values");
        }
        // Ratio math downstream needs strictly positive performance.
        for (int i = 0; i < performances.rows(); ++i) {
            for (int k = 0; k < performances.cols(); ++k) {
                if (performances(i, k) <= 0.0) {
                    throw domain_error("non-positive performance value at row " +
                                       std::to_string(i) + ", objective '" +
                                       schema.performance[k].name + "'");
                }
            }
        }
        const auto offsets = schema.column_offsets();
        for (std::size_t v = 0; v < schema.design.size(); ++v) {
            if (schema.design[v].kind != DesignVariable::Kind::categorical) continue;
            for (int i = 0; i < n_rows(); ++i) {
                double sum = 0.0;
                for (int j = 0; j < schema.design[v].width(); ++j) {
                    sum += designs(i, offsets[v] + j);
                }
                if (sum != 1.0) {
                    throw validation_error("one-hot group '" + schema.design[v].name +
                                           "' does not sum to 1 at row " + std::to_string(i));
                }
            }
        }
    }

    std::size_t feasible_count() const {
        std::size_t c = 0;
        for (auto f : feasible) c += f != 0;
        return c;
    }

    std::vector<int> feasible_indices() const {
        std::vector<int> idx;
        for (int i = 0; i < n_rows(); ++i)
            if (feasible[i]) idx.push_back(i);
        return idx;
    }
};

// Linear interpolation between closest ranks: rank = (n-1) * q on the
// sorted values, q in (0, 1).
inline double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw validation_error("percentile of empty set");
    if (!(q > 0.0 && q < 1.0)) throw validation_error("percentile fraction must be in (0,1)");
    std::sort(values.begin(), values.end());
    const double rank = (static_cast<double>(values.size()) - 1.0) * q;
    const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

// Population standard deviation (divide by n).
inline double population_std(const Eigen::Ref<const Vector>& v) {
    const double mean = v.mean();
    return std::sqrt((v.array() - mean).square().mean());
}

// Maps continuous design columns to [0,1] and performance columns to
// zero-mean unit-std. One-hot columns pass through unchanged.
struct Normalizer {
    Vector design_lo, design_hi;          // per encoded column
    std::vector<std::uint8_t> design_is_continuous;
    Vector perf_mean, perf_std;

    Matrix normalize_designs(const Matrix& raw) const {
        Matrix out = raw;
        for (int j = 0; j < out.cols(); ++j) {
            if (!design_is_continuous[j]) continue;
            out.col(j) = (raw.col(j).array() - design_lo[j]) / (design_hi[j] - design_lo[j]);
        }
        return out;
    }

    Matrix denormalize_designs(const Matrix& norm) const {
        Matrix out = norm;
        for (int j = 0; j < out.cols(); ++j) {
            if (!design_is_continuous[j]) continue;
            out.col(j) = norm.col(j).array() * (design_hi[j] - design_lo[j]) + design_lo[j];
        }
        return out;
    }

    Matrix normalize_performances(const Matrix& raw) const {
        Matrix out(raw.rows(), raw.cols());
        for (int k = 0; k < raw.cols(); ++k) {
            out.col(k) = (raw.col(k).array() - perf_mean[k]) / perf_std[k];
        }
        return out;
    }

    Matrix denormalize_performances(const Matrix& norm) const {
        Matrix out(norm.rows(), norm.cols());
        for (int k = 0; k < norm.cols(); ++k) {
            out.col(k) = norm.col(k).array() * perf_std[k] + perf_mean[k];
        }
        return out;
    }
};

inline Normalizer fit_normalizer(const Dataset& data) {
    data.validate();
    const int d = data.encoded_width();
    const int t = data.objective_count();

    Normalizer norm;
    norm.design_lo = Vector::Zero(d);
    norm.design_hi = Vector::Ones(d);
    norm.design_is_continuous.assign(d, 0);

    const auto offsets = data.schema.column_offsets();
    for (std::size_t v = 0; v < data.schema.design.size(); ++v) {
        const auto& var = data.schema.design[v];
        if (var.kind != DesignVariable::Kind::continuous) continue;
        const int j = offsets[v];
        const double lo = data.designs.col(j).minCoeff();
        const double hi = data.designs.col(j).maxCoeff();
        if (!(hi > lo)) {
            throw domain_error("degenerate design column '" + var.name + "': max must exceed min");
        }
        norm.design_lo[j] = lo;
        norm.design_hi[j] = hi;
        norm.design_is_continuous[j] = 1;
    }

    norm.perf_mean = Vector(t);
    norm.perf_std = Vector(t);
    for (int k = 0; k < t; ++k) {
        norm.perf_mean[k] = data.performances.col(k).mean();
        norm.perf_std[k] = population_std(data.performances.col(k));
        if (!(norm.perf_std[k] > 0.0)) {
            throw domain_error("degenerate performance column '" +
                               data.schema.performance[k].name + "': zero spread");
        }
    }
    return norm;
}

// Per-objective target, priority and post-target decay.
struct TargetSpec {
    Vector t;      // raw units
    Vector alpha;  // > 0
    Vector beta;   // > 0
    std::vector<Direction> directions;

    int objective_count() const { return static_cast<int>(t.size()); }

    void validate() const {
        const auto n = t.size();
        if (alpha.size() != n || beta.size() != n ||
            static_cast<Eigen::Index>(directions.size()) != n) {
            throw dimension_error("target spec vectors disagree in length");
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            if (!(alpha[k] > 0.0)) throw validation_error("alpha must be positive (objective " + std::to_string(k) + ")");
            if (!(beta[k] > 0.0)) throw validation_error("beta must be positive (objective " + std::to_string(k) + ")");
            if (!std::isfinite(t[k]) || !(t[k] > 0.0)) {
                throw validation_error("target must be finite and positive (objective " + std::to_string(k) + ")");
            }
        }
    }
};

struct RatioMatrix {
    Matrix values;  // n x T, all entries finite and > 0
};

// Targets at a dataset percentile taken over feasible rows, in each
// objective's achievement direction: the 75th percentile of a minimized
// objective is the value only 25% of rows get below.
inline TargetSpec compute_targets(const Dataset& data, double percent,
                                  const Vector& alpha, const Vector& beta) {
    if (!(percent > 0.0 && percent < 100.0)) {
        throw validation_error("percentile must be in (0,100)");
    }
    const auto idx = data.feasible_indices();
    if (idx.empty()) throw validation_error("cannot compute targets: no feasible rows");

    const int t_count = data.objective_count();
    if (alpha.size() != t_count || beta.size() != t_count) {
        throw dimension_error("alpha/beta length must equal objective count");
    }

    TargetSpec targets;
    targets.t = Vector(t_count);
    targets.alpha = alpha;
    targets.beta = beta;
    targets.directions.resize(t_count);

    for (int k = 0; k < t_count; ++k) {
        std::vector<double> vals;
        vals.reserve(idx.size());
        for (int i : idx) vals.push_back(data.performances(i, k));
        const Direction dir = data.schema.performance[k].direction;
        const double q = dir == Direction::maximize ? percent / 100.0 : 1.0 - percent / 100.0;
        targets.t[k] = percentile(std::move(vals), q);
        targets.directions[k] = dir;
    }
    targets.validate();
    return targets;
}

inline TargetSpec compute_targets(const Dataset& data, double percent) {
    const int t_count = data.objective_count();
    return compute_targets(data, percent, Vector::Ones(t_count), Vector::Ones(t_count));
}

// Achievement ratios oriented so r >= 1 means the target is met in
// either direction: maximize -> p/t, minimize -> t/p.
inline RatioMatrix target_ratios(const Matrix& perf, const TargetSpec& targets) {
    targets.validate();
    if (perf.cols() != targets.objective_count()) {
        throw dimension_error("performance matrix width must equal objective count");
    }
    RatioMatrix ratios;
    ratios.values.resize(perf.rows(), perf.cols());
    for (int i = 0; i < perf.rows(); ++i) {
        for (int k = 0; k < perf.cols(); ++k) {
            const double p = perf(i, k);
            if (!(p > 0.0) || !std::isfinite(p)) {
                throw domain_error("non-positive performance at (row " + std::to_string(i) +
                                   ", objective " + std::to_string(k) + ")");
            }
            ratios.values(i, k) = targets.directions[k] == Direction::maximize
                                      ? p / targets.t[k]
                                      : targets.t[k] / p;
        }
    }
    return ratios;
}

} // namespace dgen

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgen/core.hpp"
#include "dgen/errors.hpp"
#include "dgen/rng.hpp"

namespace dgen {

enum class Act { identity, relu, sigmoid, softmax };

inline std::string to_string(Act a) {
    switch (a) {
        case Act::identity: return "identity";
        case Act::relu: return "relu";
        case Act::sigmoid: return "sigmoid";
        case Act::softmax: return "softmax";
    }
    throw contract_error("unreachable activation kind");
}

inline Act act_from_string(const std::string& s) {
    if (s == "identity") return Act::identity;
    if (s == "relu") return Act::relu;
    if (s == "sigmoid") return Act::sigmoid;
    if (s == "softmax") return Act::softmax;
    throw parse_error("unknown activation '" + s + "'");
}

// A layer activation is a list of segments covering the layer width.
// Uniform activations are a single segment; softmax groups and mixed
// generator outputs (sigmoid for continuous coordinates, softmax per
// categorical group) use several.
struct ActSegment {
    Act kind = Act::identity;
    int width = 0;
    double temperature = 1.0;  // softmax only
};

using Activation = std::vector<ActSegment>;

inline Activation uniform_activation(Act kind, int width) {
    return {ActSegment{kind, width, 1.0}};
}

inline Activation softmax_groups(const std::vector<int>& extents, double temperature = 1.0) {
    Activation act;
    for (int e : extents) act.push_back(ActSegment{Act::softmax, e, temperature});
    return act;
}

struct NetSpec {
    std::vector<int> widths;             // input, hidden..., output
    std::vector<Activation> activations; // one per non-input layer

    int input_width() const { return widths.front(); }
    int output_width() const { return widths.back(); }
    int layer_count() const { return static_cast<int>(widths.size()) - 1; }

    void validate() const {
        if (widths.size() < 2) throw validation_error("net needs at least input and output widths");
        for (int w : widths) {
            if (w < 1) throw validation_error("layer widths must be >= 1");
        }
        if (activations.size() != widths.size() - 1) {
            throw validation_error("need one activation per non-input layer");
        }
        for (std::size_t l = 0; l < activations.size(); ++l) {
            int covered = 0;
            for (const auto& seg : activations[l]) {
                if (seg.width < 1) throw validation_error("activation segment width must be >= 1");
                if (seg.kind == Act::softmax && !(seg.temperature > 0.0)) {
                    throw validation_error("softmax temperature must be positive");
                }
                covered += seg.width;
            }
            if (covered != widths[l + 1]) {
                throw validation_error("activation segments must partition layer width " +
                                       std::to_string(widths[l + 1]));
            }
        }
    }
};

// Two-hidden-layer rectified net, the default surrogate/GAN body.
inline NetSpec dense_spec(int input, const std::vector<int>& hidden, int output,
                          Act output_act) {
    NetSpec spec;
    spec.widths.push_back(input);
    for (int h : hidden) {
        spec.widths.push_back(h);
        spec.activations.push_back(uniform_activation(Act::relu, h));
    }
    spec.widths.push_back(output);
    spec.activations.push_back(uniform_activation(output_act, output));
    spec.validate();
    return spec;
}

struct NetParams {
    struct Layer {
        Matrix w;  // out x in
        Vector b;  // out
    };
    std::vector<Layer> layers;

    void check_shapes(const NetSpec& spec) const {
        if (layers.size() != spec.activations.size()) {
            throw dimension_error("param layer count does not match spec");
        }
        for (std::size_t l = 0; l < layers.size(); ++l) {
            if (layers[l].w.rows() != spec.widths[l + 1] || layers[l].w.cols() != spec.widths[l] ||
                layers[l].b.size() != spec.widths[l + 1]) {
                throw dimension_error("param shapes do not match spec at layer " + std::to_string(l));
            }
        }
    }

    bool all_finite() const {
        for (const auto& l : layers) {
            if (!l.w.allFinite() || !l.b.allFinite()) return false;
        }
        return true;
    }
};

// Uniform init in +-sqrt(6 / (fan_in + fan_out)) from the seeded stream.
inline NetParams init_params(const NetSpec& spec, std::uint64_t seed) {
    spec.validate();
    NetParams params;
    Rng rng(seed);
    for (int l = 0; l < spec.layer_count(); ++l) {
        const int fan_in = spec.widths[l];
        const int fan_out = spec.widths[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        NetParams::Layer layer;
        layer.w.resize(fan_out, fan_in);
        for (int i = 0; i < fan_out; ++i) {
            for (int j = 0; j < fan_in; ++j) {
                layer.w(i, j) = rng.uniform(-bound, bound);
            }
        }
        layer.b = Vector::Zero(fan_out);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

namespace detail {

// Sigmoid clamped into the open interval: saturation at |z| > ~37
// would otherwise round to exactly 0 or 1.
inline double sigmoid(double z) {
    const double s = 1.0 / (1.0 + std::exp(-z));
    if (s >= 1.0) return std::nextafter(1.0, 0.0);
    if (s <= 0.0) return std::numeric_limits<double>::min();
    return s;
}

inline void apply_activation(const Activation& act, const Eigen::Ref<const Matrix>& z,
                             Matrix& a) {
    a.resize(z.rows(), z.cols());
    int at = 0;
    for (const auto& seg : act) {
        switch (seg.kind) {
            case Act::identity:
                a.middleCols(at, seg.width) = z.middleCols(at, seg.width);
                break;
            case Act::relu:
                a.middleCols(at, seg.width) = z.middleCols(at, seg.width).cwiseMax(0.0);
                break;
            case Act::sigmoid:
                for (int i = 0; i < z.rows(); ++i) {
                    for (int j = 0; j < seg.width; ++j) {
                        a(i, at + j) = sigmoid(z(i, at + j));
                    }
                }
                break;
            case Act::softmax:
                for (int i = 0; i < z.rows(); ++i) {
                    double zmax = -std::numeric_limits<double>::infinity();
                    for (int j = 0; j < seg.width; ++j) {
                        zmax = std::max(zmax, z(i, at + j) / seg.temperature);
                    }
                    double sum = 0.0;
                    for (int j = 0; j < seg.width; ++j) {
                        const double e = std::exp(z(i, at + j) / seg.temperature - zmax);
                        a(i, at + j) = e;
                        sum += e;
                    }
                    for (int j = 0; j < seg.width; ++j) a(i, at + j) /= sum;
                }
                break;
        }
        at += seg.width;
    }
}

// d(loss)/d(z) from d(loss)/d(a), given both z and a.
inline Matrix activation_backward(const Activation& act, const Matrix& z, const Matrix& a,
                                  const Matrix& upstream) {
    Matrix dz(z.rows(), z.cols());
    int at = 0;
    for (const auto& seg : act) {
        switch (seg.kind) {
            case Act::identity:
                dz.middleCols(at, seg.width) = upstream.middleCols(at, seg.width);
                break;
            case Act::relu:
                dz.middleCols(at, seg.width) =
                    (z.middleCols(at, seg.width).array() > 0.0)
                        .select(upstream.middleCols(at, seg.width), 0.0);
                break;
            case Act::sigmoid:
                dz.middleCols(at, seg.width) = upstream.middleCols(at, seg.width).array() *
                                               a.middleCols(at, seg.width).array() *
                                               (1.0 - a.middleCols(at, seg.width).array());
                break;
            case Act::softmax:
                for (int i = 0; i < z.rows(); ++i) {
                    double dot = 0.0;
                    for (int j = 0; j < seg.width; ++j) {
                        dot += upstream(i, at + j) * a(i, at + j);
                    }
                    for (int j = 0; j < seg.width; ++j) {
                        dz(i, at + j) =
                            a(i, at + j) * (upstream(i, at + j) - dot) / seg.temperature;
                    }
                }
                break;
        }
        at += seg.width;
    }
    return dz;
}

} // namespace detail

// Everything backward needs: inputs plus per-layer pre-activations and
// activations from one forward call.
struct ForwardCache {
    Matrix input;
    std::vector<Matrix> pre;  // z per layer
    std::vector<Matrix> act;  // a per layer
};

inline Matrix net_forward(const NetParams& params, const NetSpec& spec, const Matrix& x,
                          ForwardCache* cache = nullptr) {
    params.check_shapes(spec);
    if (x.cols() != spec.input_width()) {
        throw dimension_error("input width " + std::to_string(x.cols()) + " does not match net input " +
                              std::to_string(spec.input_width()));
    }
    if (!x.allFinite()) throw domain_error("non-finite network input");

    if (cache) {
        cache->input = x;
        cache->pre.clear();
        cache->act.clear();
    }
    Matrix a = x;
    Matrix next;
    for (int l = 0; l < spec.layer_count(); ++l) {
        Matrix z = a * params.layers[l].w.transpose();
        z.rowwise() += params.layers[l].b.transpose();
        detail::apply_activation(spec.activations[l], z, next);
        if (cache) {
            cache->pre.push_back(z);
            cache->act.push_back(next);
        }
        a = next;
    }
    return a;
}

struct NetGradients {
    std::vector<NetParams::Layer> layers;  // same shapes as params
    Matrix input;                          // d(loss)/d(x)
};

inline NetGradients net_backward(const NetParams& params, const NetSpec& spec,
                                 const ForwardCache& cache, const Matrix& upstream) {
    params.check_shapes(spec);
    if (cache.pre.size() != static_cast<std::size_t>(spec.layer_count()) ||
        cache.input.cols() != spec.input_width()) {
        throw contract_error("forward cache does not match this net");
    }
    if (upstream.rows() != cache.input.rows() || upstream.cols() != spec.output_width()) {
        throw contract_error("upstream gradient shape does not match cached forward pass");
    }

    NetGradients grads;
    grads.layers.resize(spec.layer_count());

    Matrix da = upstream;
    for (int l = spec.layer_count() - 1; l >= 0; --l) {
        const Matrix dz =
            detail::activation_backward(spec.activations[l], cache.pre[l], cache.act[l], da);
        const Matrix& below = l == 0 ? cache.input : cache.act[l - 1];
        grads.layers[l].w = dz.transpose() * below;
        grads.layers[l].b = dz.colwise().sum();
        da = dz * params.layers[l].w;
    }
    grads.input = da;
    return grads;
}

// --- checkpoint serialization ------------------------------------------

inline nlohmann::json activation_to_json(const Activation& act) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& seg : act) {
        nlohmann::json s{{"kind", to_string(seg.kind)}, {"width", seg.width}};
        if (seg.kind == Act::softmax) s["temperature"] = seg.temperature;
        segs.push_back(std::move(s));
    }
    return segs;
}

inline Activation activation_from_json(const nlohmann::json& doc) {
    Activation act;
    for (const auto& s : doc) {
        ActSegment seg;
        seg.kind = act_from_string(s.at("kind").get<std::string>());
        seg.width = s.at("width").get<int>();
        if (s.contains("temperature")) seg.temperature = s.at("temperature").get<double>();
        act.push_back(seg);
    }
    return act;
}

inline nlohmann::json spec_to_json(const NetSpec& spec) {
    nlohmann::json doc;
    doc["widths"] = spec.widths;
    doc["activations"] = nlohmann::json::array();
    for (const auto& act : spec.activations) {
        doc["activations"].push_back(activation_to_json(act));
    }
    return doc;
}

inline NetSpec spec_from_json(const nlohmann::json& doc) {
    NetSpec spec;
    spec.widths = doc.at("widths").get<std::vector<int>>();
    for (const auto& act : doc.at("activations")) {
        spec.activations.push_back(activation_from_json(act));
    }
    spec.validate();
    return spec;
}

inline nlohmann::json params_to_json(const NetParams& params) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : params.layers) {
        std::vector<double> w;  // row-major
        w.reserve(layer.w.size());
        for (int i = 0; i < layer.w.rows(); ++i) {
            for (int j = 0; j < layer.w.cols(); ++j) w.push_back(layer.w(i, j));
        }
        std::vector<double> b(layer.b.data(), layer.b.data() + layer.b.size());
        layers.push_back({{"w", w}, {"b", b}});
    }
    return layers;
}

inline NetParams params_from_json(const nlohmann::json& doc, const NetSpec& spec) {
    NetParams params;
    for (int l = 0; l < spec.layer_count(); ++l) {
        const auto& entry = doc.at(l);
        const int rows = spec.widths[l + 1];
        const int cols = spec.widths[l];
        const auto w = entry.at("w").get<std::vector<double>>();
        const auto b = entry.at("b").get<std::vector<double>>();
        if (static_cast<int>(w.size()) != rows * cols || static_cast<int>(b.size()) != rows) {
            throw parse_error("checkpoint layer " + std::to_string(l) + " has wrong size");
        }
        NetParams::Layer layer;
        layer.w.resize(rows, cols);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) layer.w(i, j) = w[i * cols + j];
        }
        layer.b = Eigen::Map<const Vector>(b.data(), rows);
        params.layers.push_back(std::move(layer));
    }
    params.check_shapes(spec);
    return params;
}

inline nlohmann::json normalizer_to_json(const Normalizer& norm) {
    nlohmann::json doc;
    doc["design_lo"] = std::vector<double>(norm.design_lo.data(),
                                           norm.design_lo.data() + norm.design_lo.size());
    doc["design_hi"] = std::vector<double>(norm.design_hi.data(),
                                           norm.design_hi.data() + norm.design_hi.size());
    doc["design_is_continuous"] =
        std::vector<int>(norm.design_is_continuous.begin(), norm.design_is_continuous.end());
    doc["perf_mean"] = std::vector<double>(norm.perf_mean.data(),
                                           norm.perf_mean.data() + norm.perf_mean.size());
    doc["perf_std"] = std::vector<double>(norm.perf_std.data(),
                                          norm.perf_std.data() + norm.perf_std.size());
    return doc;
}

inline Normalizer normalizer_from_json(const nlohmann::json& doc) {
    Normalizer norm;
    const auto lo = doc.at("design_lo").get<std::vector<double>>();
    const auto hi = doc.at("design_hi").get<std::vector<double>>();
    const auto flags = doc.at("design_is_continuous").get<std::vector<int>>();
    const auto mean = doc.at("perf_mean").get<std::vector<double>>();
    const auto stddev = doc.at("perf_std").get<std::vector<double>>();
    norm.design_lo = Eigen::Map<const Vector>(lo.data(), lo.size());
    norm.design_hi = Eigen::Map<const Vector>(hi.data(), hi.size());
    norm.design_is_continuous.assign(flags.begin(), flags.end());
    norm.perf_mean = Eigen::Map<const Vector>(mean.data(), mean.size());
    norm.perf_std = Eigen::Map<const Vector>(stddev.data(), stddev.size());
    return norm;
}

} // namespace dgen

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "iil/errors.hpp"
#include "iil/rng.hpp"
#include "iil/tensor.hpp"

namespace iil {

inline constexpr double kLeakyReluSlope = 0.01;

enum class Activation { identity, tanh, leaky_relu };

inline double apply_activation(Activation act, double z) {
    switch (act) {
        case Activation::identity: return z;
        case Activation::tanh: return std::tanh(z);
        case Activation::leaky_relu: return z > 0.0 ? z : kLeakyReluSlope * z;
    }
    return z;
}

// Derivative expressed through the activation output. Valid for all three
// activations: tanh' = 1 - y^2, and leaky_relu preserves the sign of z.
inline double activation_grad(Activation act, double y) {
    switch (act) {
        case Activation::identity: return 1.0;
        case Activation::tanh: return 1.0 - y * y;
        case Activation::leaky_relu: return y > 0.0 ? 1.0 : kLeakyReluSlope;
    }
    return 1.0;
}

struct DenseLayer {
    ParamTensor weight;  // [out, in]
    ParamTensor bias;    // [out]
    Activation act = Activation::identity;

    DenseLayer(std::size_t in, std::size_t out, Activation a)
        : weight({out, in}), bias({out}), act(a) {}

    std::size_t in_dim() const { return weight.shape[1]; }
    std::size_t out_dim() const { return weight.shape[0]; }
};

// Caller-owned forward cache. Holding it outside the net lets one frozen net
// serve several concurrent forwards (and lets a loss run the same net twice,
// as the curiosity module does on s_t and s_{t+1}).
struct MlpCache {
    bool valid = false;
    Matrix input;                 // layer 0 input
    std::vector<Matrix> outputs;  // post-activation output per layer
};

// Feed-forward multi-layer perceptron over real64 with explicit reverse-mode
// backward. This is the only network shape in the repo; all composite losses
// chain gradients through these by hand.
class Mlp {
public:
    Mlp() = default;

    Mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
        std::size_t output_dim, Activation hidden_act,
        Activation output_act = Activation::identity) {
        std::size_t in = input_dim;
        for (std::size_t h : hidden) {
            layers_.emplace_back(in, h, hidden_act);
            in = h;
        }
        layers_.emplace_back(in, output_dim, output_act);
    }

    std::size_t input_dim() const { return layers_.front().in_dim(); }
    std::size_t output_dim() const { return layers_.back().out_dim(); }
    std::size_t num_layers() const { return layers_.size(); }
    DenseLayer& layer(std::size_t i) { return layers_[i]; }
    const DenseLayer& layer(std::size_t i) const { return layers_[i]; }

    // Uniform [-sqrt(6/(fan_in+fan_out)), +...] weights, zero biases.
    void init(Rng& rng) {
        for (DenseLayer& l : layers_) {
            double bound = std::sqrt(6.0 / static_cast<double>(l.in_dim() + l.out_dim()));
            for (double& w : l.weight.values) w = rng.uniform(-bound, bound);
            std::fill(l.bias.values.begin(), l.bias.values.end(), 0.0);
            l.weight.zero_grad();
            l.bias.zero_grad();
        }
    }

    Matrix forward(const Matrix& x, MlpCache& cache) const {
        if (x.cols != input_dim())
            throw DimensionError("Mlp::forward: input width " + std::to_string(x.cols) +
                                 " != " + std::to_string(input_dim()));
        cache.input = x;
        cache.outputs.resize(layers_.size());
        const Matrix* cur = &cache.input;
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            affine_activate(layers_[li], *cur, cache.outputs[li]);
            cur = &cache.outputs[li];
        }
        cache.valid = true;
        return *cur;
    }

    // Gradient-free evaluation for frozen nets.
    Matrix forward(const Matrix& x) const {
        MlpCache scratch;
        return forward(x, scratch);
    }

    // Accumulates dLoss/dW, dLoss/db into the parameter grads and returns
    // dLoss/dx. The cache stays valid; repeated backwards accumulate.
    Matrix backward(const MlpCache& cache, const Matrix& upstream) {
        if (!cache.valid) throw StateError("Mlp::backward: no cached forward");
        if (upstream.cols != output_dim() || upstream.rows != cache.input.rows)
            throw DimensionError("Mlp::backward: upstream shape mismatch");

        Matrix delta = upstream;
        for (std::size_t li = layers_.size(); li-- > 0;) {
            DenseLayer& l = layers_[li];
            const Matrix& y = cache.outputs[li];
            const Matrix& x = li == 0 ? cache.input : cache.outputs[li - 1];
            const std::size_t batch = delta.rows, out = l.out_dim(), in = l.in_dim();

            for (std::size_t b = 0; b < batch; ++b)
                for (std::size_t o = 0; o < out; ++o)
                    delta(b, o) *= activation_grad(l.act, y(b, o));

            double* wg = l.weight.grad.data();
            double* bg = l.bias.grad.data();
            Matrix dx(batch, in);
            for (std::size_t b = 0; b < batch; ++b) {
                const double* xr = x.row(b);
                double* dxr = dx.row(b);
                for (std::size_t o = 0; o < out; ++o) {
                    const double d = delta(b, o);
                    const double* wr = l.weight.values.data() + o * in;
                    double* wgr = wg + o * in;
                    bg[o] += d;
                    for (std::size_t i = 0; i < in; ++i) {
                        wgr[i] += d * xr[i];
                        dxr[i] += d * wr[i];
                    }
                }
            }
            delta = std::move(dx);
        }
        return delta;
    }

    std::vector<NamedParam> params(const std::string& prefix) {
        std::vector<NamedParam> out;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            out.push_back({prefix + ".w" + std::to_string(i), &layers_[i].weight});
            out.push_back({prefix + ".b" + std::to_string(i), &layers_[i].bias});
        }
        return out;
    }

    void zero_grad() {
        for (DenseLayer& l : layers_) {
            l.weight.zero_grad();
            l.bias.zero_grad();
        }
    }

private:
    static void affine_activate(const DenseLayer& l, const Matrix& x, Matrix& out) {
        const std::size_t batch = x.rows, in = l.in_dim(), outd = l.out_dim();
        out = Matrix(batch, outd);
        for (std::size_t b = 0; b < batch; ++b) {
            const double* xr = x.row(b);
            double* yr = out.row(b);
            for (std::size_t o = 0; o < outd; ++o) {
                const double* wr = l.weight.values.data() + o * in;
                double acc = l.bias.values[o];
                for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
                yr[o] = apply_activation(l.act, acc);
            }
        }
    }

    std::vector<DenseLayer> layers_;
};

}  // namespace iil

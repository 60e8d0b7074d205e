#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "iil/errors.hpp"
#include "iil/tensor.hpp"

namespace iil {

// Bias-corrected Adam over a fixed parameter list. Moment buffers are laid
// out in registration order, so the same list must be passed to every step.
class AdamState {
public:
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;

    AdamState(double lr_in, const std::vector<NamedParam>& params) : lr(lr_in) {
        attach(params);
    }

    void attach(const std::vector<NamedParam>& params) {
        m_.clear();
        v_.clear();
        for (const NamedParam& p : params) {
            m_.emplace_back(p.tensor->size(), 0.0);
            v_.emplace_back(p.tensor->size(), 0.0);
        }
        step_ = 0;
    }

    std::size_t step_count() const { return step_; }

    // One update from the accumulated grads. Grads are left untouched; the
    // caller zeroes them between batches.
    void step(const std::vector<NamedParam>& params) {
        if (params.size() != m_.size())
            throw DimensionError("AdamState::step: parameter list changed");
        ++step_;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_));
        for (std::size_t pi = 0; pi < params.size(); ++pi) {
            ParamTensor& t = *params[pi].tensor;
            if (t.size() != m_[pi].size())
                throw DimensionError("AdamState::step: tensor shape changed");
            for (std::size_t i = 0; i < t.size(); ++i) {
                const double g = t.grad[i];
                m_[pi][i] = beta1 * m_[pi][i] + (1.0 - beta1) * g;
                v_[pi][i] = beta2 * v_[pi][i] + (1.0 - beta2) * g * g;
                const double mhat = m_[pi][i] / bc1;
                const double vhat = v_[pi][i] / bc2;
                t.values[i] -= lr * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }

private:
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::size_t step_ = 0;
};

inline void zero_grads(const std::vector<NamedParam>& params) {
    for (const NamedParam& p : params) p.tensor->zero_grad();
}

}  // namespace iil

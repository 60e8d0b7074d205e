#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "iil/adam.hpp"
#include "iil/demo.hpp"
#include "iil/distributions.hpp"
#include "iil/envs.hpp"
#include "iil/girl.hpp"
#include "iil/nn.hpp"
#include "iil/ppo.hpp"

namespace iil {

struct IcmConfig {
    double lambda = 1.0;
    std::size_t feature_dim = 32;
    std::vector<std::size_t> hidden = {64, 64};
    Activation activation = Activation::leaky_relu;

    void validate() const {
        if (!(lambda > 0.0)) throw ConfigError("icm: lambda must be > 0");
        if (feature_dim == 0) throw ConfigError("icm: feature_dim must be > 0");
    }
};

struct IcmLosses {
    double inverse = 0.0;  // L_I: action prediction loss
    double forward = 0.0;  // L_F: squared feature prediction error
    double total = 0.0;    // L_I + L_F, minimized
};

// Intrinsic curiosity module: a feature encoder, an inverse-dynamics head
// predicting the action from (phi(s), phi(s')), and a forward model
// predicting phi(s') from (phi(s), a). The feature net takes gradients from
// both losses, including through the forward model's target.
class IcmModule {
public:
    IcmModule() = default;

    IcmModule(std::size_t state_dim, ActionSpace space, IcmConfig cfg, Rng& rng)
        : cfg_(cfg),
          space_(std::move(space)),
          state_dim_(state_dim),
          feature_(state_dim, cfg.hidden, cfg.feature_dim, cfg.activation),
          inverse_(2 * cfg.feature_dim, cfg.hidden, space_.encoded_dim(), cfg.activation),
          forward_(cfg.feature_dim + space_.encoded_dim(), cfg.hidden, cfg.feature_dim,
                   cfg.activation) {
        cfg_.validate();
        feature_.init(rng);
        inverse_.init(rng);
        forward_.init(rng);
    }

    const IcmConfig& config() const { return cfg_; }
    bool discrete() const { return space_.discrete(); }
    Mlp& feature_net() { return feature_; }
    Mlp& inverse_net() { return inverse_; }
    Mlp& forward_net() { return forward_; }

    std::vector<NamedParam> params(const std::string& prefix = "icm") {
        std::vector<NamedParam> out = feature_.params(prefix + ".feature");
        for (NamedParam& p : inverse_.params(prefix + ".inverse")) out.push_back(p);
        for (NamedParam& p : forward_.params(prefix + ".forward")) out.push_back(p);
        return out;
    }

    void zero_grad() {
        feature_.zero_grad();
        inverse_.zero_grad();
        forward_.zero_grad();
    }

    // Joint objective on normalized transitions; accumulates gradients of
    // L_I + L_F into all three nets.
    IcmLosses objective(const std::vector<Transition>& batch) {
        const std::size_t B = batch.size();
        if (B == 0) throw DimensionError("icm objective: empty batch");
        const std::size_t F = cfg_.feature_dim;
        const std::size_t A = space_.encoded_dim();

        Matrix s(B, state_dim_), sp(B, state_dim_);
        for (std::size_t b = 0; b < B; ++b) {
            if (batch[b].state.size() != state_dim_ || batch[b].next_state.size() != state_dim_)
                throw DimensionError("icm objective: state width mismatch");
            std::copy(batch[b].state.begin(), batch[b].state.end(), s.row(b));
            std::copy(batch[b].next_state.begin(), batch[b].next_state.end(), sp.row(b));
        }
        require_normalized(s, "icm objective");
        require_normalized(sp, "icm objective");

        MlpCache cache_s, cache_sp;
        const Matrix phi = feature_.forward(s, cache_s);
        const Matrix phi_p = feature_.forward(sp, cache_sp);

        Matrix inv_in(B, 2 * F);
        Matrix fwd_in(B, F + A);
        for (std::size_t b = 0; b < B; ++b) {
            std::copy(phi.row(b), phi.row(b) + F, inv_in.row(b));
            std::copy(phi_p.row(b), phi_p.row(b) + F, inv_in.row(b) + F);
            std::copy(phi.row(b), phi.row(b) + F, fwd_in.row(b));
            const std::vector<double> a_vec = encode_action(space_, batch[b].action);
            std::copy(a_vec.begin(), a_vec.end(), fwd_in.row(b) + F);
        }
        MlpCache cache_inv, cache_fwd;
        const Matrix pred_a = inverse_.forward(inv_in, cache_inv);
        const Matrix pred_phi = forward_.forward(fwd_in, cache_fwd);

        IcmLosses out;
        const double inv_b = 1.0 / static_cast<double>(B);

        Matrix d_pred_a(B, A);
        for (std::size_t b = 0; b < B; ++b) {
            if (space_.discrete()) {
                std::vector<double> logits(pred_a.row(b), pred_a.row(b) + A);
                Categorical soft = softmax(logits);
                const std::size_t a = batch[b].action.index;
                out.inverse += -std::log(std::max(soft.probs[a], 1e-300)) * inv_b;
                for (std::size_t j = 0; j < A; ++j)
                    d_pred_a(b, j) = (soft.probs[j] - (j == a ? 1.0 : 0.0)) * inv_b;
            } else {
                for (std::size_t j = 0; j < A; ++j) {
                    const double diff = pred_a(b, j) - batch[b].action.continuous[j];
                    out.inverse += diff * diff * inv_b;
                    d_pred_a(b, j) = 2.0 * diff * inv_b;
                }
            }
        }

        Matrix d_pred_phi(B, F);
        Matrix d_phi_p_target(B, F);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t f = 0; f < F; ++f) {
                const double diff = pred_phi(b, f) - phi_p(b, f);
                out.forward += diff * diff * inv_b;
                d_pred_phi(b, f) = 2.0 * diff * inv_b;
                d_phi_p_target(b, f) = -2.0 * diff * inv_b;
            }

        const Matrix d_inv_in = inverse_.backward(cache_inv, d_pred_a);
        const Matrix d_fwd_in = forward_.backward(cache_fwd, d_pred_phi);

        Matrix d_phi(B, F), d_phi_p(B, F);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t f = 0; f < F; ++f) {
                d_phi(b, f) = d_inv_in(b, f) + d_fwd_in(b, f);
                d_phi_p(b, f) = d_inv_in(b, F + f) + d_phi_p_target(b, f);
            }
        feature_.backward(cache_s, d_phi);
        feature_.backward(cache_sp, d_phi_p);

        out.total = out.inverse + out.forward;
        return out;
    }

    // Deterministic curiosity reward: lambda * squared feature error.
    void rewards(const Matrix& states, const std::vector<Action>& actions,
                 const Matrix& next_states, std::vector<double>& out) const {
        const std::size_t B = states.rows;
        if (actions.size() != B || next_states.rows != B)
            throw DimensionError("icm reward: batch size mismatch");
        require_normalized(states, "icm reward");
        require_normalized(next_states, "icm reward");
        const std::size_t F = cfg_.feature_dim, A = space_.encoded_dim();

        const Matrix phi = feature_.forward(states);
        const Matrix phi_p = feature_.forward(next_states);
        Matrix fwd_in(B, F + A);
        for (std::size_t b = 0; b < B; ++b) {
            std::copy(phi.row(b), phi.row(b) + F, fwd_in.row(b));
            const std::vector<double> a_vec = encode_action(space_, actions[b]);
            std::copy(a_vec.begin(), a_vec.end(), fwd_in.row(b) + F);
        }
        const Matrix pred = forward_.forward(fwd_in);
        out.assign(B, 0.0);
        for (std::size_t b = 0; b < B; ++b) {
            double err = 0.0;
            for (std::size_t f = 0; f < F; ++f) {
                const double d = pred(b, f) - phi_p(b, f);
                err += d * d;
            }
            out[b] = cfg_.lambda * err;
        }
    }

    double reward(const std::vector<double>& state, const Action& action,
                  const std::vector<double>& next_state) const {
        Matrix s = Matrix::from_row(state);
        Matrix sp = Matrix::from_row(next_state);
        std::vector<double> out;
        rewards(s, {action}, sp, out);
        return out[0];
    }

    // Fraction of transitions whose inverse-dynamics argmax matches the
    // demonstrated discrete action.
    double inverse_accuracy(const std::vector<Transition>& batch) const {
        if (!space_.discrete()) throw StateError("inverse_accuracy: discrete mode only");
        const std::size_t B = batch.size(), F = cfg_.feature_dim;
        Matrix s(B, state_dim_), sp(B, state_dim_);
        for (std::size_t b = 0; b < B; ++b) {
            std::copy(batch[b].state.begin(), batch[b].state.end(), s.row(b));
            std::copy(batch[b].next_state.begin(), batch[b].next_state.end(), sp.row(b));
        }
        const Matrix phi = feature_.forward(s);
        const Matrix phi_p = feature_.forward(sp);
        Matrix inv_in(B, 2 * F);
        for (std::size_t b = 0; b < B; ++b) {
            std::copy(phi.row(b), phi.row(b) + F, inv_in.row(b));
            std::copy(phi_p.row(b), phi_p.row(b) + F, inv_in.row(b) + F);
        }
        const Matrix pred = inverse_.forward(inv_in);
        std::size_t hits = 0;
        for (std::size_t b = 0; b < B; ++b) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < space_.n; ++j)
                if (pred(b, j) > pred(b, best)) best = j;
            if (best == batch[b].action.index) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(B);
    }

private:
    IcmConfig cfg_;
    ActionSpace space_;
    std::size_t state_dim_ = 0;
    Mlp feature_;
    Mlp inverse_;
    Mlp forward_;
};

// Same loop as train_girl: one strided minibatch and one descent step per
// epoch on the joint objective.
struct IcmTrainRow {
    std::size_t epoch = 0;
    IcmLosses loss;
};

inline std::vector<IcmTrainRow> train_icm(IcmModule& module, const Demonstration& demo,
                                          const StateNormalizer& norm, std::size_t epochs,
                                          std::size_t batch_size, double lr, std::size_t stride,
                                          Rng& rng, std::size_t log_every = 1000) {
    Demonstration normalized = demo;
    for (Transition& t : normalized.transitions) {
        t.state = norm.normalize(t.state);
        t.next_state = norm.normalize(t.next_state);
    }
    auto params = module.params();
    AdamState adam(lr, params);
    std::vector<IcmTrainRow> log;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        auto batch = sample_minibatch(normalized, batch_size, stride, rng);
        module.zero_grad();
        IcmLosses loss = module.objective(batch);
        if (!std::isfinite(loss.total))
            throw NumericError("train_icm: non-finite objective (L_I=" +
                               std::to_string(loss.inverse) +
                               " L_F=" + std::to_string(loss.forward) + ")");
        adam.step(params);
        if (epoch % log_every == 0 || epoch + 1 == epochs)
            log.push_back({epoch, loss});
    }
    module.zero_grad();
    return log;
}

class IcmRewardSource final : public RewardSource {
public:
    IcmRewardSource(const IcmModule& module, StateNormalizer norm)
        : module_(module), norm_(std::move(norm)) {}

    void compute(const Matrix& states, const std::vector<Action>& actions,
                 const Matrix& next_states, Rng&, std::vector<double>& out) override {
        Matrix s = states, sp = next_states;
        norm_.normalize_rows(s);
        norm_.normalize_rows(sp);
        module_.rewards(s, actions, sp, out);
    }

private:
    const IcmModule& module_;
    StateNormalizer norm_;
};

}  // namespace iil

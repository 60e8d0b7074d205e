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
#include "iil/policy.hpp"
#include "iil/ppo.hpp"

namespace iil {

inline double stable_softplus(double x) {
    return std::log1p(std::exp(-std::fabs(x))) + std::max(x, 0.0);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct DiscConfig {
    bool vail = false;
    double i_c = 0.5;          // VAIL information constraint
    double dual_step = 1e-5;   // lagrange_beta ascent step
    std::size_t bottleneck_dim = 32;
    std::vector<std::size_t> hidden = {64, 64};
    Activation activation = Activation::leaky_relu;
};

// Binary discriminator over normalized (state, action-vector) pairs. The
// logit estimates P(policy): demonstration samples carry label 0, policy
// samples label 1, so -log D rewards expert-like behavior. In VAIL mode the
// trunk emits a Gaussian bottleneck whose KL to N(0,I) is held under i_c by
// a dual variable.
class Discriminator {
public:
    Discriminator() = default;

    Discriminator(std::size_t state_dim, ActionSpace space, DiscConfig cfg, Rng& rng)
        : cfg_(cfg), space_(std::move(space)), state_dim_(state_dim) {
        const std::size_t in = state_dim + space_.encoded_dim();
        if (cfg_.vail) {
            trunk_ = Mlp(in, cfg.hidden, 2 * cfg.bottleneck_dim, cfg.activation);
            head_ = Mlp(cfg.bottleneck_dim, {}, 1, Activation::identity);
            head_.init(rng);
        } else {
            trunk_ = Mlp(in, cfg.hidden, 1, cfg.activation);
        }
        trunk_.init(rng);
    }

    const DiscConfig& config() const { return cfg_; }
    bool vail() const { return cfg_.vail; }
    double lagrange_beta() const { return lagrange_beta_; }
    Mlp& trunk() { return trunk_; }

    std::vector<NamedParam> params(const std::string& prefix = "disc") {
        std::vector<NamedParam> out = trunk_.params(prefix + ".trunk");
        if (cfg_.vail)
            for (NamedParam& p : head_.params(prefix + ".head")) out.push_back(p);
        return out;
    }

    void zero_grad() {
        trunk_.zero_grad();
        head_.zero_grad();
    }

    // Deterministic logits (VAIL routes the bottleneck mean).
    std::vector<double> logits(const Matrix& states, const std::vector<Action>& actions) const {
        const std::size_t B = states.rows;
        Matrix in = assemble(states, actions);
        std::vector<double> out(B);
        if (cfg_.vail) {
            const Matrix bottleneck = trunk_.forward(in);
            Matrix mu(B, cfg_.bottleneck_dim);
            for (std::size_t b = 0; b < B; ++b)
                std::copy(bottleneck.row(b), bottleneck.row(b) + cfg_.bottleneck_dim, mu.row(b));
            const Matrix logit = head_.forward(mu);
            for (std::size_t b = 0; b < B; ++b) out[b] = logit(b, 0);
        } else {
            const Matrix logit = trunk_.forward(in);
            for (std::size_t b = 0; b < B; ++b) out[b] = logit(b, 0);
        }
        return out;
    }

    struct LossStats {
        double loss = 0.0;           // logistic loss plus the VAIL KL penalty
        double logistic = 0.0;       // plain binary logistic part
        double bottleneck_kl = 0.0;  // mean bottleneck KL (VAIL, else 0)
        double lagrange_beta = 0.0;
    };

    // Accumulates gradients of the training loss over a combined batch:
    // demo rows labelled 0 (real), policy rows labelled 1 (fake).
    LossStats loss(const Matrix& demo_states, const std::vector<Action>& demo_actions,
                   const Matrix& policy_states, const std::vector<Action>& policy_actions,
                   Rng& rng) {
        const std::size_t Bd = demo_states.rows, Bp = policy_states.rows;
        if (Bd == 0 || Bp == 0) throw DimensionError("disc loss: empty batch");
        const std::size_t B = Bd + Bp;
        Matrix in(B, state_dim_ + space_.encoded_dim());
        {
            Matrix demo_in = assemble(demo_states, demo_actions);
            Matrix pol_in = assemble(policy_states, policy_actions);
            for (std::size_t b = 0; b < Bd; ++b)
                std::copy(demo_in.row(b), demo_in.row(b) + in.cols, in.row(b));
            for (std::size_t b = 0; b < Bp; ++b)
                std::copy(pol_in.row(b), pol_in.row(b) + in.cols, in.row(Bd + b));
        }
        const double inv_b = 1.0 / static_cast<double>(B);
        LossStats stats;

        MlpCache trunk_cache;
        const Matrix trunk_out = trunk_.forward(in, trunk_cache);

        if (!cfg_.vail) {
            Matrix d_logit(B, 1);
            for (std::size_t b = 0; b < B; ++b) {
                const double l = trunk_out(b, 0);
                const bool fake = b >= Bd;
                stats.logistic += (fake ? stable_softplus(-l) : stable_softplus(l)) * inv_b;
                d_logit(b, 0) = (fake ? -sigmoid(-l) : sigmoid(l)) * inv_b;
            }
            trunk_.backward(trunk_cache, d_logit);
            stats.loss = stats.logistic;
            stats.lagrange_beta = lagrange_beta_;
            return stats;
        }

        // VAIL: reparameterized bottleneck sample feeds the classifier head;
        // the KL penalty weights in through the dual variable.
        const std::size_t K = cfg_.bottleneck_dim;
        Matrix mu(B, K), log_sig(B, K), sig(B, K), mask(B, K), eps(B, K), sample(B, K);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t k = 0; k < K; ++k) {
                mu(b, k) = trunk_out(b, k);
                const double raw = trunk_out(b, K + k);
                log_sig(b, k) = std::clamp(raw, -10.0, 4.0);
                mask(b, k) = raw > -10.0 && raw < 4.0 ? 1.0 : 0.0;
                sig(b, k) = std::exp(log_sig(b, k));
                eps(b, k) = rng.normal();
                sample(b, k) = mu(b, k) + sig(b, k) * eps(b, k);
            }
        MlpCache head_cache;
        const Matrix logit = head_.forward(sample, head_cache);

        Matrix d_logit(B, 1);
        for (std::size_t b = 0; b < B; ++b) {
            const double l = logit(b, 0);
            const bool fake = b >= Bd;
            stats.logistic += (fake ? stable_softplus(-l) : stable_softplus(l)) * inv_b;
            d_logit(b, 0) = (fake ? -sigmoid(-l) : sigmoid(l)) * inv_b;
        }
        const Matrix d_sample = head_.backward(head_cache, d_logit);

        Matrix d_trunk(B, 2 * K);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t k = 0; k < K; ++k) {
                const double m = mu(b, k), s = sig(b, k);
                stats.bottleneck_kl += 0.5 * (m * m + s * s - 1.0 - 2.0 * log_sig(b, k)) * inv_b;
                const double d_mu = d_sample(b, k) + lagrange_beta_ * m * inv_b;
                const double d_ls =
                    d_sample(b, k) * s * eps(b, k) + lagrange_beta_ * (s * s - 1.0) * inv_b;
                d_trunk(b, k) = d_mu;
                d_trunk(b, K + k) = mask(b, k) * d_ls;
            }
        trunk_.backward(trunk_cache, d_trunk);

        stats.loss = stats.logistic + lagrange_beta_ * stats.bottleneck_kl;
        stats.lagrange_beta = lagrange_beta_;
        return stats;
    }

    // Dual ascent on the information constraint; no-op for plain GAIL.
    void dual_update(double bottleneck_kl) {
        if (!cfg_.vail) return;
        lagrange_beta_ = std::max(0.0, lagrange_beta_ + cfg_.dual_step * (bottleneck_kl - cfg_.i_c));
    }

private:
    Matrix assemble(const Matrix& states, const std::vector<Action>& actions) const {
        if (states.cols != state_dim_ || actions.size() != states.rows)
            throw DimensionError("discriminator: batch shape mismatch");
        require_normalized(states, "discriminator");
        Matrix in(states.rows, state_dim_ + space_.encoded_dim());
        for (std::size_t b = 0; b < states.rows; ++b) {
            std::copy(states.row(b), states.row(b) + state_dim_, in.row(b));
            const std::vector<double> a = encode_action(space_, actions[b]);
            std::copy(a.begin(), a.end(), in.row(b) + state_dim_);
        }
        return in;
    }

    DiscConfig cfg_;
    ActionSpace space_;
    std::size_t state_dim_ = 0;
    Mlp trunk_;
    Mlp head_;
    double lagrange_beta_ = 0.0;
};

// One Adam step on the logistic (+VAIL KL) loss followed by the dual update.
inline Discriminator::LossStats disc_update(Discriminator& disc, AdamState& adam,
                                            const Matrix& demo_states,
                                            const std::vector<Action>& demo_actions,
                                            const Matrix& policy_states,
                                            const std::vector<Action>& policy_actions,
                                            Rng& rng) {
    auto params = disc.params();
    disc.zero_grad();
    auto stats = disc.loss(demo_states, demo_actions, policy_states, policy_actions, rng);
    if (!std::isfinite(stats.loss))
        throw NumericError("disc_update: non-finite loss " + std::to_string(stats.loss));
    adam.step(params);
    zero_grads(params);
    disc.dual_update(stats.bottleneck_kl);
    return stats;
}

// r1 = -log D, r2 = -log(1-D); D clamped away from {0,1} so both stay finite.
inline double gail_reward_from_prob(double d, int variant) {
    if (variant != 1 && variant != 2) throw ConfigError("gail: reward variant must be 1 or 2");
    const double clamped = std::clamp(d, 1e-8, 1.0 - 1e-8);
    return variant == 1 ? -std::log(clamped) : -std::log(1.0 - clamped);
}

inline double gail_reward(const Discriminator& disc, const std::vector<double>& state_norm,
                          const Action& action, int variant) {
    Matrix s = Matrix::from_row(state_norm);
    const double logit = disc.logits(s, {action})[0];
    return gail_reward_from_prob(sigmoid(logit), variant);
}

// Adversarial reward source: normalizes observations, evaluates the frozen
// discriminator on (s_t, a_t). The next state is not consulted.
class GailRewardSource final : public RewardSource {
public:
    GailRewardSource(const Discriminator& disc, StateNormalizer norm, int variant)
        : disc_(disc), norm_(std::move(norm)), variant_(variant) {}

    void compute(const Matrix& states, const std::vector<Action>& actions, const Matrix&,
                 Rng&, std::vector<double>& out) override {
        Matrix s = states;
        norm_.normalize_rows(s);
        const std::vector<double> logits = disc_.logits(s, actions);
        out.resize(logits.size());
        for (std::size_t b = 0; b < logits.size(); ++b)
            out[b] = gail_reward_from_prob(sigmoid(logits[b]), variant_);
    }

private:
    const Discriminator& disc_;
    StateNormalizer norm_;
    int variant_;
};

// ---------------------------------------------------------------------------
// Behavioral cloning: supervised negative log-likelihood of demo actions
// under an independent PolicyNet (actor only; the critic is untouched).
// ---------------------------------------------------------------------------

inline double bc_nll_loss(PolicyNet& policy, const std::vector<Transition>& batch) {
    const std::size_t B = batch.size();
    if (B == 0) throw DimensionError("bc loss: empty batch");
    const bool discrete = policy.space().discrete();
    const std::size_t A = policy.space().encoded_dim();
    Matrix states(B, batch[0].state.size());
    for (std::size_t b = 0; b < B; ++b)
        std::copy(batch[b].state.begin(), batch[b].state.end(), states.row(b));

    MlpCache cache;
    const Matrix head = policy.actor().forward(states, cache);
    Matrix d_head(B, A);
    double nll = 0.0;
    const double inv_b = 1.0 / static_cast<double>(B);
    const std::vector<double> sd = discrete ? std::vector<double>{} : policy.stddev();
    for (std::size_t b = 0; b < B; ++b) {
        if (discrete) {
            std::vector<double> logits(head.row(b), head.row(b) + A);
            Categorical cat = softmax(logits);
            const std::size_t a = batch[b].action.index;
            nll += -std::log(std::max(cat.probs[a], 1e-300)) * inv_b;
            for (std::size_t j = 0; j < A; ++j)
                d_head(b, j) = (cat.probs[j] - (j == a ? 1.0 : 0.0)) * inv_b;
        } else {
            for (std::size_t j = 0; j < A; ++j) {
                const double diff = batch[b].action.continuous[j] - head(b, j);
                const double z = diff / sd[j];
                nll += (0.5 * z * z + std::log(sd[j]) + 0.5 * kLogTwoPi) * inv_b;
                d_head(b, j) = -z / sd[j] * inv_b;
                const double in_range =
                    policy.log_std().values[j] > -10.0 && policy.log_std().values[j] < 4.0
                        ? 1.0 : 0.0;
                policy.log_std().grad[j] += in_range * (1.0 - z * z) * inv_b;
            }
        }
    }
    policy.actor().backward(cache, d_head);
    return nll;
}

struct BcTrainRow {
    std::size_t epoch = 0;
    double nll = 0.0;
};

inline std::vector<BcTrainRow> train_bc(PolicyNet& policy, const Demonstration& demo,
                                        std::size_t epochs, std::size_t batch_size, double lr,
                                        Rng& rng, std::size_t log_every = 200) {
    auto params = policy.params("bc");
    AdamState adam(lr, params);
    std::vector<BcTrainRow> log;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        auto batch = sample_minibatch(demo, batch_size, 1, rng);
        zero_grads(params);
        const double nll = bc_nll_loss(policy, batch);
        if (!std::isfinite(nll)) throw NumericError("train_bc: non-finite NLL");
        adam.step(params);
        if (epoch % log_every == 0 || epoch + 1 == epochs) log.push_back({epoch, nll});
    }
    zero_grads(params);
    return log;
}

}  // namespace iil

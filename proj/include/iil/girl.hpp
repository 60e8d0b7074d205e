#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "iil/adam.hpp"
#include "iil/demo.hpp"
#include "iil/distributions.hpp"
#include "iil/envs.hpp"
#include "iil/nn.hpp"
#include "iil/ppo.hpp"
#include "iil/rng.hpp"

namespace iil {

// Affine per-dimension map between environment bounds and [-1,1].
class StateNormalizer {
public:
    StateNormalizer() = default;

    StateNormalizer(std::vector<double> low, std::vector<double> high)
        : low_(std::move(low)), high_(std::move(high)) {
        if (low_.size() != high_.size())
            throw DimensionError("StateNormalizer: bound widths differ");
        for (std::size_t i = 0; i < low_.size(); ++i) {
            if (!std::isfinite(low_[i]) || !std::isfinite(high_[i]) || !(high_[i] > low_[i]))
                throw ConfigError("StateNormalizer: dimension " + std::to_string(i) +
                                  " has no usable bounds");
        }
    }

    static StateNormalizer for_env(const MdpSpec& spec) {
        return StateNormalizer(spec.state_low, spec.state_high);
    }

    std::size_t dim() const { return low_.size(); }

    std::vector<double> normalize(const std::vector<double>& x) const {
        check_dim(x);
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = 2.0 * (x[i] - low_[i]) / (high_[i] - low_[i]) - 1.0;
        return out;
    }

    std::vector<double> denormalize(const std::vector<double>& x) const {
        check_dim(x);
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = low_[i] + (x[i] + 1.0) * 0.5 * (high_[i] - low_[i]);
        return out;
    }

    void normalize_rows(Matrix& m) const {
        if (m.cols != dim()) throw DimensionError("StateNormalizer: width mismatch");
        for (std::size_t b = 0; b < m.rows; ++b) {
            double* r = m.row(b);
            for (std::size_t i = 0; i < m.cols; ++i)
                r[i] = 2.0 * (r[i] - low_[i]) / (high_[i] - low_[i]) - 1.0;
        }
    }

private:
    void check_dim(const std::vector<double>& x) const {
        if (x.size() != dim()) throw DimensionError("StateNormalizer: width mismatch");
    }

    std::vector<double> low_, high_;
};

inline void require_normalized(const Matrix& m, const char* what) {
    for (double v : m.data)
        if (!(std::fabs(v) <= 1.0 + 1e-6))
            throw DomainError(std::string(what) + ": states must be normalized to [-1,1]");
}

struct GirlConfig {
    double alpha = 100.0;  // policy-term weight (1.0 for continuous tasks)
    double lambda = 1.0;   // reconstruction / reward scale
    double beta = 1.0;     // true-action weight at inference, in (0,1]
    bool learned_prior = false;
    std::vector<std::size_t> hidden = {64, 64};
    Activation activation = Activation::leaky_relu;

    void validate() const {
        if (!(alpha >= 0.0)) throw ConfigError("girl: alpha must be >= 0");
        if (!(lambda > 0.0)) throw ConfigError("girl: lambda must be > 0");
        if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("girl: beta in (0,1]");
    }
};

struct GirlLossBreakdown {
    double reconstruction = 0.0;  // -lambda * mean squared reconstruction error
    double latent_kl = 0.0;       // KL(q(z|s,s') || prior)
    double policy_term = 0.0;     // cross-entropy (discrete) or MSE (continuous)
    double total = 0.0;           // reconstruction - latent_kl - alpha * policy_term
};

// Conditional-VAE reward module. The encoder reads (s_t, s_{t+1}) and emits a
// Gaussian over an action-sized latent (backward action encoding); the
// decoder reads (action vector, s_t) and predicts s_{t+1} through a tanh head
// (forward state transition). Sampling the latent at inference turns the
// reconstruction error into a family of rewards rather than a fixed one.
class GirlModule {
public:
    GirlModule() = default;

    GirlModule(std::size_t state_dim, ActionSpace space, GirlConfig cfg, Rng& rng)
        : cfg_(cfg),
          space_(std::move(space)),
          state_dim_(state_dim),
          latent_dim_(space_.encoded_dim()),
          encoder_(2 * state_dim, cfg.hidden, 2 * latent_dim_, cfg.activation),
          decoder_(latent_dim_ + state_dim, cfg.hidden, state_dim, cfg.activation,
                   Activation::tanh) {
        cfg_.validate();
        encoder_.init(rng);
        decoder_.init(rng);
        if (cfg_.learned_prior) {
            prior_ = Mlp(state_dim, cfg.hidden, 2 * latent_dim_, cfg.activation);
            prior_.init(rng);
        }
    }

    const GirlConfig& config() const { return cfg_; }
    GirlConfig& config() { return cfg_; }
    std::size_t latent_dim() const { return latent_dim_; }
    std::size_t state_dim() const { return state_dim_; }
    bool discrete() const { return space_.discrete(); }
    Mlp& encoder() { return encoder_; }
    Mlp& decoder() { return decoder_; }

    std::vector<NamedParam> params(const std::string& prefix = "girl") {
        std::vector<NamedParam> out = encoder_.params(prefix + ".encoder");
        for (NamedParam& p : decoder_.params(prefix + ".decoder")) out.push_back(p);
        if (cfg_.learned_prior)
            for (NamedParam& p : prior_.params(prefix + ".prior")) out.push_back(p);
        return out;
    }

    void zero_grad() {
        encoder_.zero_grad();
        decoder_.zero_grad();
        if (cfg_.learned_prior) prior_.zero_grad();
    }

    // Evaluates the training objective on a batch of normalized transitions
    // and accumulates gradients of its negation (for minimization). One
    // reparameterized latent sample per transition.
    GirlLossBreakdown objective(const std::vector<Transition>& batch, Rng& rng) {
        const std::size_t B = batch.size();
        if (B == 0) throw DimensionError("girl objective: empty batch");

        Matrix enc_in(B, 2 * state_dim_);
        Matrix dec_s(B, state_dim_);
        Matrix targets(B, state_dim_);
        for (std::size_t b = 0; b < B; ++b) {
            const Transition& t = batch[b];
            if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_)
                throw DimensionError("girl objective: state width mismatch");
            std::copy(t.state.begin(), t.state.end(), enc_in.row(b));
            std::copy(t.next_state.begin(), t.next_state.end(), enc_in.row(b) + state_dim_);
            std::copy(t.state.begin(), t.state.end(), dec_s.row(b));
            std::copy(t.next_state.begin(), t.next_state.end(), targets.row(b));
        }
        require_normalized(enc_in, "girl objective");

        MlpCache enc_cache;
        const Matrix enc_out = encoder_.forward(enc_in, enc_cache);

        // Optional learned prior heads.
        MlpCache prior_cache;
        Matrix prior_out;
        if (cfg_.learned_prior) prior_out = prior_.forward(dec_s, prior_cache);

        const std::size_t A = latent_dim_;
        Matrix mu(B, A), log_sigma(B, A), sigma(B, A), clamp_mask(B, A);
        Matrix noise(B, A), z(B, A);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t j = 0; j < A; ++j) {
                mu(b, j) = enc_out(b, j);
                const double raw = enc_out(b, A + j);
                log_sigma(b, j) = std::clamp(raw, -10.0, 4.0);
                clamp_mask(b, j) = raw > -10.0 && raw < 4.0 ? 1.0 : 0.0;
                sigma(b, j) = std::exp(log_sigma(b, j));
                noise(b, j) = rng.normal();
                z(b, j) = mu(b, j) + sigma(b, j) * noise(b, j);
            }

        // Decoder forward on (z || s); training feeds the raw latent as the
        // intermediate action.
        Matrix dec_in(B, A + state_dim_);
        for (std::size_t b = 0; b < B; ++b) {
            std::copy(z.row(b), z.row(b) + A, dec_in.row(b));
            std::copy(dec_s.row(b), dec_s.row(b) + state_dim_, dec_in.row(b) + A);
        }
        MlpCache dec_cache;
        const Matrix recon = decoder_.forward(dec_in, dec_cache);

        GirlLossBreakdown out;
        const double inv_b = 1.0 / static_cast<double>(B);

        // Reconstruction term and its gradient through the decoder.
        Matrix d_recon(B, state_dim_);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t j = 0; j < state_dim_; ++j) {
                const double err = recon(b, j) - targets(b, j);
                out.reconstruction += -cfg_.lambda * err * err * inv_b;
                d_recon(b, j) = 2.0 * cfg_.lambda * err * inv_b;  // d(-recon)/d recon
            }
        const Matrix d_dec_in = decoder_.backward(dec_cache, d_recon);

        // Latent KL and policy terms with their z/mu/sigma gradients.
        Matrix d_mu(B, A), d_log_sigma(B, A), d_z(B, A);
        Matrix d_prior_out;
        if (cfg_.learned_prior) d_prior_out = Matrix(B, 2 * A);
        for (std::size_t b = 0; b < B; ++b) {
            // dz from the reconstruction path (first A columns of dec input).
            for (std::size_t j = 0; j < A; ++j) d_z(b, j) = d_dec_in(b, j);

            if (cfg_.learned_prior) {
                for (std::size_t j = 0; j < A; ++j) {
                    const double mu0 = prior_out(b, j);
                    const double raw0 = prior_out(b, A + j);
                    const double ls0 = std::clamp(raw0, -10.0, 4.0);
                    const double mask0 = raw0 > -10.0 && raw0 < 4.0 ? 1.0 : 0.0;
                    const double s0 = std::exp(ls0);
                    const double s = sigma(b, j);
                    const double d = mu(b, j) - mu0;
                    out.latent_kl += (ls0 - log_sigma(b, j) +
                                      (s * s + d * d) / (2.0 * s0 * s0) - 0.5) * inv_b;
                    d_mu(b, j) += d / (s0 * s0) * inv_b;
                    d_log_sigma(b, j) += (s * s / (s0 * s0) - 1.0) * inv_b;
                    d_prior_out(b, j) = -d / (s0 * s0) * inv_b;
                    d_prior_out(b, A + j) =
                        mask0 * (1.0 - (s * s + d * d) / (s0 * s0)) * inv_b;
                }
            } else {
                for (std::size_t j = 0; j < A; ++j) {
                    const double s = sigma(b, j), m = mu(b, j);
                    out.latent_kl += 0.5 * (m * m + s * s - 1.0 - 2.0 * log_sigma(b, j)) * inv_b;
                    d_mu(b, j) += m * inv_b;
                    d_log_sigma(b, j) += (s * s - 1.0) * inv_b;
                }
            }

            // Third objective term: backward action encoding against the
            // demonstrated action.
            if (space_.discrete()) {
                std::vector<double> logits(z.row(b), z.row(b) + A);
                Categorical soft = softmax(logits);
                const std::size_t a = batch[b].action.index;
                out.policy_term += -std::log(std::max(soft.probs[a], 1e-300)) * inv_b;
                for (std::size_t j = 0; j < A; ++j)
                    d_z(b, j) += cfg_.alpha * (soft.probs[j] - (j == a ? 1.0 : 0.0)) * inv_b;
            } else {
                const std::vector<double>& a = batch[b].action.continuous;
                if (a.size() != A) throw DimensionError("girl objective: action width");
                for (std::size_t j = 0; j < A; ++j) {
                    const double diff = z(b, j) - a[j];
                    out.policy_term += diff * diff * inv_b;
                    d_z(b, j) += cfg_.alpha * 2.0 * diff * inv_b;
                }
            }
        }

        // Chain z = mu + sigma * eps into the encoder heads.
        Matrix d_enc_out(B, 2 * A);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t j = 0; j < A; ++j) {
                d_enc_out(b, j) = d_mu(b, j) + d_z(b, j);
                d_enc_out(b, A + j) =
                    clamp_mask(b, j) *
                    (d_log_sigma(b, j) + d_z(b, j) * sigma(b, j) * noise(b, j));
            }
        encoder_.backward(enc_cache, d_enc_out);
        if (cfg_.learned_prior) prior_.backward(prior_cache, d_prior_out);

        out.total = out.reconstruction - out.latent_kl - cfg_.alpha * out.policy_term;
        return out;
    }

    // Batched reward inference per the trained module. States must already be
    // normalized. beta = 1 uses the decoder alone (no latent sample, no rng
    // consumption); beta < 1 blends the sampled action encoding in.
    void infer_rewards(const Matrix& states, const std::vector<Action>& actions,
                       const Matrix& next_states, Rng& rng, std::vector<double>& out) const {
        const std::size_t B = states.rows;
        if (actions.size() != B || next_states.rows != B)
            throw DimensionError("girl reward: batch size mismatch");
        require_normalized(states, "girl reward");
        require_normalized(next_states, "girl reward");

        const std::size_t A = latent_dim_;
        Matrix action_enc(B, A);
        if (cfg_.beta < 1.0) {
            Matrix enc_in(B, 2 * state_dim_);
            for (std::size_t b = 0; b < B; ++b) {
                std::copy(states.row(b), states.row(b) + state_dim_, enc_in.row(b));
                std::copy(next_states.row(b), next_states.row(b) + state_dim_,
                          enc_in.row(b) + state_dim_);
            }
            const Matrix enc_out = encoder_.forward(enc_in);
            for (std::size_t b = 0; b < B; ++b) {
                std::vector<double> z(A);
                for (std::size_t j = 0; j < A; ++j) {
                    const double s = std::exp(std::clamp(enc_out(b, A + j), -10.0, 4.0));
                    z[j] = enc_out(b, j) + s * rng.normal();
                }
                if (space_.discrete()) {
                    Categorical soft = softmax(z);
                    for (std::size_t j = 0; j < A; ++j) action_enc(b, j) = soft.probs[j];
                } else {
                    for (std::size_t j = 0; j < A; ++j) action_enc(b, j) = z[j];
                }
            }
        }

        Matrix dec_in(B, A + state_dim_);
        for (std::size_t b = 0; b < B; ++b) {
            const std::vector<double> a_vec = encode_action(space_, actions[b]);
            for (std::size_t j = 0; j < A; ++j) {
                const double blended = cfg_.beta < 1.0
                    ? cfg_.beta * a_vec[j] + (1.0 - cfg_.beta) * action_enc(b, j)
                    : a_vec[j];
                dec_in(b, j) = blended;
            }
            std::copy(states.row(b), states.row(b) + state_dim_, dec_in.row(b) + A);
        }
        const Matrix recon = decoder_.forward(dec_in);
        out.assign(B, 0.0);
        for (std::size_t b = 0; b < B; ++b) {
            double err = 0.0;
            for (std::size_t j = 0; j < state_dim_; ++j) {
                const double d = recon(b, j) - next_states(b, j);
                err += d * d;
            }
            out[b] = cfg_.lambda * err;
        }
    }

    double infer_reward(const std::vector<double>& state, const Action& action,
                        const std::vector<double>& next_state, Rng& rng) const {
        Matrix s = Matrix::from_row(state);
        Matrix sp = Matrix::from_row(next_state);
        std::vector<double> out;
        infer_rewards(s, {action}, sp, rng, out);
        return out[0];
    }

private:
    GirlConfig cfg_;
    ActionSpace space_;
    std::size_t state_dim_ = 0;
    std::size_t latent_dim_ = 0;
    Mlp encoder_;
    Mlp decoder_;
    Mlp prior_;
};

struct RewardTrainRow {
    std::size_t epoch = 0;
    GirlLossBreakdown loss;
};

// Alg.-style reward-module training: one strided minibatch and one ascent
// step per epoch. Transitions are normalized once up front.
inline std::vector<RewardTrainRow> train_girl(GirlModule& module, const Demonstration& demo,
                                              const StateNormalizer& norm, std::size_t epochs,
                                              std::size_t batch_size, double lr,
                                              std::size_t stride, Rng& rng,
                                              std::size_t log_every = 1000) {
    Demonstration normalized = demo;
    for (Transition& t : normalized.transitions) {
        t.state = norm.normalize(t.state);
        t.next_state = norm.normalize(t.next_state);
    }
    auto params = module.params();
    AdamState adam(lr, params);
    std::vector<RewardTrainRow> log;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        auto batch = sample_minibatch(normalized, batch_size, stride, rng);
        module.zero_grad();
        GirlLossBreakdown loss = module.objective(batch, rng);
        if (!std::isfinite(loss.total))
            throw NumericError("train_girl: non-finite objective (recon=" +
                               std::to_string(loss.reconstruction) +
                               " kl=" + std::to_string(loss.latent_kl) +
                               " policy=" + std::to_string(loss.policy_term) + ")");
        adam.step(params);
        if (epoch % log_every == 0 || epoch + 1 == epochs)
            log.push_back({epoch, loss});
    }
    module.zero_grad();
    return log;
}

// Rollout-time reward source: normalizes raw observations, one-hot encodes
// nothing (the module handles action encoding), and queries the module.
class GirlRewardSource final : public RewardSource {
public:
    GirlRewardSource(const GirlModule& module, StateNormalizer norm)
        : module_(module), norm_(std::move(norm)) {}

    void compute(const Matrix& states, const std::vector<Action>& actions,
                 const Matrix& next_states, Rng& rng, std::vector<double>& out) override {
        Matrix s = states, sp = next_states;
        norm_.normalize_rows(s);
        norm_.normalize_rows(sp);
        module_.infer_rewards(s, actions, sp, rng, out);
    }

private:
    const GirlModule& module_;
    StateNormalizer norm_;
};

}  // namespace iil

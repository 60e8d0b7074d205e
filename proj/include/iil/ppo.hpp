#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "iil/adam.hpp"
#include "iil/envs.hpp"
#include "iil/policy.hpp"
#include "iil/rng.hpp"

namespace iil {

struct PpoConfig {
    double lr = 2.5e-4;
    double clip_eps = 0.1;
    double entropy_coef = 0.01;
    double value_coef = 0.5;
    double gae_lambda = 0.95;
    double gamma = 0.99;
    std::size_t horizon = 128;
    std::size_t num_envs = 16;
    std::size_t epochs_per_update = 4;
    std::size_t minibatches = 4;

    void validate() const {
        if (!(clip_eps > 0.0)) throw ConfigError("ppo: clip_eps must be > 0");
        if (gae_lambda < 0.0 || gae_lambda > 1.0) throw ConfigError("ppo: gae_lambda in [0,1]");
        if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("ppo: gamma in (0,1)");
    }
};

// Reward channel for rollouts. Implementations wrap the trained reward
// modules; the true environment reward is handled separately so the guard
// can prove it is never read during imitation.
class RewardSource {
public:
    virtual ~RewardSource() = default;
    virtual void compute(const Matrix& states, const std::vector<Action>& actions,
                         const Matrix& next_states, Rng& rng,
                         std::vector<double>& out) = 0;
};

// Divides rewards by a running std estimate of per-env discounted reward
// sums. R accumulates gamma-discounted rewards per env and resets on done;
// every R lands in one shared variance accumulator.
class RewardStandardizer {
public:
    RewardStandardizer() = default;
    RewardStandardizer(bool enabled, double gamma, std::size_t num_envs)
        : enabled_(enabled), gamma_(gamma), running_(num_envs, 0.0) {}

    bool enabled() const { return enabled_; }

    std::vector<double> standardize(const std::vector<double>& rewards,
                                    const std::vector<std::uint8_t>& dones) {
        if (!enabled_) return rewards;
        if (rewards.size() != running_.size() || dones.size() != running_.size())
            throw DimensionError("standardize: env count mismatch");
        std::vector<double> out(rewards.size());
        for (std::size_t e = 0; e < rewards.size(); ++e) {
            running_[e] = gamma_ * running_[e] + rewards[e];
            push(running_[e]);
            out[e] = rewards[e] / std::max(std::sqrt(variance()), 1e-8);
            if (dones[e]) running_[e] = 0.0;
        }
        return out;
    }

    double variance() const { return count_ > 0 ? m2_ / static_cast<double>(count_) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    std::size_t count() const { return count_; }
    const std::vector<double>& running_returns() const { return running_; }

private:
    void push(double x) {
        ++count_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(count_);
        m2_ += d * (x - mean_);
    }

    bool enabled_ = false;
    double gamma_ = 0.99;
    std::vector<double> running_;
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Fixed-horizon slab of vectorized experience, time-major: index = t*N + e.
struct RolloutBatch {
    std::size_t num_envs = 0;
    std::size_t horizon = 0;
    Matrix states;                     // [T*N, state_dim]
    std::vector<Action> actions;       // T*N
    std::vector<double> log_probs;     // T*N
    std::vector<double> values;        // T*N
    std::vector<double> rewards;       // T*N, as delivered to the learner
    std::vector<std::uint8_t> dones;   // T*N
    std::vector<double> bootstrap;     // N, critic value of the final obs
    std::vector<double> advantages;    // T*N
    std::vector<double> returns;       // T*N

    std::size_t size() const { return num_envs * horizon; }

    double mean_reward() const {
        double s = 0.0;
        for (double r : rewards) s += r;
        return rewards.empty() ? 0.0 : s / static_cast<double>(rewards.size());
    }
};

// Steps the vectorized envs `horizon` times sampling from the policy. When
// `source` is null the true environment reward is delivered; otherwise the
// guard is held and rewards come exclusively from the source evaluated on
// (s_t, a_t, s_{t+1}).
inline RolloutBatch collect_rollout(const PolicyNet& policy, VecEnv& vec,
                                    RewardSource* source, std::size_t horizon,
                                    RewardStandardizer* standardizer, Rng& rng) {
    const std::size_t n = vec.size();
    const std::size_t state_dim = vec.spec().state_dim;
    RolloutBatch batch;
    batch.num_envs = n;
    batch.horizon = horizon;
    batch.states = Matrix(horizon * n, state_dim);
    batch.actions.resize(horizon * n);
    batch.log_probs.resize(horizon * n);
    batch.values.resize(horizon * n);
    batch.rewards.resize(horizon * n);
    batch.dones.resize(horizon * n);

    Matrix step_states(n, state_dim);
    std::vector<double> step_rewards(n);
    std::vector<std::uint8_t> step_dones(n);
    for (std::size_t t = 0; t < horizon; ++t) {
        for (std::size_t e = 0; e < n; ++e)
            std::copy(vec.obs(e).begin(), vec.obs(e).end(), step_states.row(e));
        PolicyNet::ActBatch act = policy.act(step_states, rng);
        std::vector<StepResult> results = vec.vec_step(act.actions);

        if (source == nullptr) {
            for (std::size_t e = 0; e < n; ++e) step_rewards[e] = results[e].true_reward();
        } else {
            TrueRewardGuard guard;
            Matrix next_states(n, state_dim);
            for (std::size_t e = 0; e < n; ++e)
                std::copy(results[e].next_state.begin(), results[e].next_state.end(),
                          next_states.row(e));
            source->compute(step_states, act.actions, next_states, rng, step_rewards);
        }
        for (std::size_t e = 0; e < n; ++e) step_dones[e] = results[e].episode_done ? 1 : 0;
        const std::vector<double> delivered =
            standardizer ? standardizer->standardize(step_rewards, step_dones) : step_rewards;

        for (std::size_t e = 0; e < n; ++e) {
            const std::size_t i = t * n + e;
            std::copy(step_states.row(e), step_states.row(e) + state_dim, batch.states.row(i));
            batch.actions[i] = act.actions[e];
            batch.log_probs[i] = act.log_probs[e];
            batch.values[i] = act.values[e];
            batch.rewards[i] = delivered[e];
            batch.dones[i] = step_dones[e];
        }
    }
    batch.bootstrap.resize(n);
    for (std::size_t e = 0; e < n; ++e) batch.bootstrap[e] = policy.value(vec.obs(e));
    return batch;
}

// Generalized advantage estimation over a time-major slab.
// delta_t = r_t + gamma*V_{t+1}*(1-done_t) - V_t
// A_t     = delta_t + gamma*lambda*(1-done_t)*A_{t+1};   returns = A + V.
inline void gae(RolloutBatch& batch, double gamma, double lambda) {
    const std::size_t T = batch.horizon, n = batch.num_envs;
    batch.advantages.assign(T * n, 0.0);
    batch.returns.assign(T * n, 0.0);
    for (std::size_t e = 0; e < n; ++e) {
        double acc = 0.0;
        for (std::size_t t = T; t-- > 0;) {
            const std::size_t i = t * n + e;
            const double nonterm = batch.dones[i] ? 0.0 : 1.0;
            const double next_v = t + 1 == T ? batch.bootstrap[e] : batch.values[(t + 1) * n + e];
            const double delta = batch.rewards[i] + gamma * next_v * nonterm - batch.values[i];
            acc = delta + gamma * lambda * nonterm * acc;
            batch.advantages[i] = acc;
            batch.returns[i] = acc + batch.values[i];
        }
    }
}

// Per-sample clipped surrogate min(rho*A, clip(rho, 1-eps, 1+eps)*A).
inline double clipped_surrogate(double ratio, double adv, double eps) {
    const double u1 = ratio * adv;
    const double u2 = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv;
    return std::min(u1, u2);
}

struct UpdateStats {
    double policy_loss = 0.0;   // negative mean surrogate
    double value_loss = 0.0;    // mean squared value error
    double entropy = 0.0;       // mean policy entropy
    double mean_ratio = 0.0;
    double total_loss = 0.0;    // minimized scalar
};

// Minimized PPO loss on one index subset, with gradients accumulated into the
// policy parameters:
//   -mean(min(rho*A, clip(rho)*A)) + value_coef*mean((V-ret)^2)
//   - entropy_coef*mean(H).
// `adv` must hold the already-normalized advantages for the whole batch.
inline UpdateStats ppo_minibatch_loss(PolicyNet& policy, const RolloutBatch& batch,
                                      const std::vector<double>& adv,
                                      const std::vector<std::size_t>& idx,
                                      const PpoConfig& cfg) {
    const std::size_t m = idx.size();
    if (m == 0) throw DimensionError("ppo loss: empty minibatch");
    const bool discrete = policy.space().discrete();
    const std::size_t act_dim = policy.space().encoded_dim();

    Matrix mb_states(m, batch.states.cols);
    for (std::size_t k = 0; k < m; ++k)
        std::copy(batch.states.row(idx[k]), batch.states.row(idx[k]) + batch.states.cols,
                  mb_states.row(k));

    MlpCache actor_cache, critic_cache;
    const Matrix head = policy.actor().forward(mb_states, actor_cache);
    const Matrix vals = policy.critic().forward(mb_states, critic_cache);

    Matrix d_head(m, act_dim);
    Matrix d_vals(m, 1);
    double sum_pl = 0.0, sum_vl = 0.0, sum_h = 0.0, sum_ratio = 0.0;
    const double inv_m = 1.0 / static_cast<double>(m);
    const std::vector<double> sd = discrete ? std::vector<double>{} : policy.stddev();

    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = idx[k];
        double logp = 0.0, ent = 0.0;
        std::vector<double> probs;
        if (discrete) {
            std::vector<double> logits(head.row(k), head.row(k) + act_dim);
            Categorical cat = softmax(logits);
            probs = cat.probs;
            logp = std::log(std::max(probs[batch.actions[i].index], 1e-300));
            ent = cat.entropy();
        } else {
            for (std::size_t j = 0; j < act_dim; ++j) {
                const double z = (batch.actions[i].continuous[j] - head(k, j)) / sd[j];
                logp += -0.5 * z * z - std::log(sd[j]) - 0.5 * kLogTwoPi;
                ent += std::log(sd[j]) + 0.5 * (kLogTwoPi + 1.0);
            }
        }
        const double ratio = std::exp(logp - batch.log_probs[i]);
        const double a = adv[i];
        const double u1 = ratio * a;
        const double u2 = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * a;
        const double verr = vals(k, 0) - batch.returns[i];

        sum_pl += -std::min(u1, u2);
        sum_vl += verr * verr;
        sum_h += ent;
        sum_ratio += ratio;

        // d(-surr)/dlogp: gradient flows only through the unclipped branch.
        const double dsurr_dlogp = u1 <= u2 ? ratio * a : 0.0;
        const double g_logp = -dsurr_dlogp * inv_m;
        if (discrete) {
            const std::size_t ai = batch.actions[i].index;
            for (std::size_t j = 0; j < act_dim; ++j) {
                const double p = probs[j];
                const double dlogp = (j == ai ? 1.0 : 0.0) - p;
                const double dent = -p * (std::log(std::max(p, 1e-300)) + ent);
                d_head(k, j) = g_logp * dlogp - cfg.entropy_coef * inv_m * dent;
            }
        } else {
            for (std::size_t j = 0; j < act_dim; ++j) {
                const double diff = batch.actions[i].continuous[j] - head(k, j);
                const double dlogp_dmu = diff / (sd[j] * sd[j]);
                d_head(k, j) = g_logp * dlogp_dmu;
                // log-std gradients: surrogate + entropy paths.
                const double dlogp_dls = diff * diff / (sd[j] * sd[j]) - 1.0;
                const double in_range =
                    policy.log_std().values[j] > -10.0 && policy.log_std().values[j] < 4.0
                        ? 1.0 : 0.0;
                policy.log_std().grad[j] +=
                    in_range * (g_logp * dlogp_dls - cfg.entropy_coef * inv_m);
            }
        }
        d_vals(k, 0) = cfg.value_coef * 2.0 * verr * inv_m;
    }

    UpdateStats stats;
    stats.policy_loss = sum_pl * inv_m;
    stats.value_loss = sum_vl * inv_m;
    stats.entropy = sum_h * inv_m;
    stats.mean_ratio = sum_ratio * inv_m;
    stats.total_loss = stats.policy_loss + cfg.value_coef * stats.value_loss -
                       cfg.entropy_coef * stats.entropy;
    if (!std::isfinite(stats.total_loss))
        throw NumericError("ppo loss: non-finite (policy=" + std::to_string(stats.policy_loss) +
                           " value=" + std::to_string(stats.value_loss) + ")");

    policy.actor().backward(actor_cache, d_head);
    policy.critic().backward(critic_cache, d_vals);
    return stats;
}

// Advantages normalized to zero mean / unit std over the whole batch.
inline std::vector<double> normalized_advantages(const RolloutBatch& batch) {
    const std::size_t total = batch.size();
    if (batch.advantages.size() != total) throw StateError("ppo: gae not computed");
    std::vector<double> adv = batch.advantages;
    double mean = 0.0;
    for (double a : adv) mean += a;
    mean /= static_cast<double>(total);
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    var /= static_cast<double>(total);
    const double scale = 1.0 / (std::sqrt(var) + 1e-8);
    for (double& a : adv) a = (a - mean) * scale;
    return adv;
}

// One PPO update: epochs_per_update passes of shuffled minibatch steps.
inline UpdateStats ppo_update(PolicyNet& policy, const RolloutBatch& batch,
                              const PpoConfig& cfg, AdamState& adam, Rng& rng) {
    cfg.validate();
    const std::size_t total = batch.size();
    if (total == 0) throw DimensionError("ppo_update: empty batch");
    const std::vector<double> adv = normalized_advantages(batch);

    auto params = policy.params("policy");
    std::vector<std::size_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;

    UpdateStats stats;
    std::size_t stat_batches = 0;
    const std::size_t mb_count = std::max<std::size_t>(1, cfg.minibatches);
    for (std::size_t epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
        for (std::size_t i = total; i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(i)]);
        for (std::size_t mb = 0; mb < mb_count; ++mb) {
            const std::size_t lo = mb * total / mb_count;
            const std::size_t hi = (mb + 1) * total / mb_count;
            if (hi <= lo) continue;
            std::vector<std::size_t> idx(order.begin() + lo, order.begin() + hi);
            UpdateStats s = ppo_minibatch_loss(policy, batch, adv, idx, cfg);
            adam.step(params);
            zero_grads(params);
            stats.policy_loss += s.policy_loss;
            stats.value_loss += s.value_loss;
            stats.entropy += s.entropy;
            stats.mean_ratio += s.mean_ratio;
            stats.total_loss += s.total_loss;
            ++stat_batches;
        }
    }
    const double denom = stat_batches ? static_cast<double>(stat_batches) : 1.0;
    stats.policy_loss /= denom;
    stats.value_loss /= denom;
    stats.entropy /= denom;
    stats.mean_ratio /= denom;
    stats.total_loss /= denom;
    return stats;
}

struct EvalResult {
    std::vector<double> per_seed_mean;
    double mean = 0.0;
    double stddev = 0.0;  // sample std over seeds (0 for a single seed)
};

// Greedy-action evaluation: `episodes` episodes per seed, undiscounted
// returns, aggregated over seeds.
inline EvalResult evaluate(const PolicyNet& policy, Env& env, std::size_t episodes,
                           const std::vector<std::uint64_t>& seeds) {
    if (episodes < 1) throw ConfigError("evaluate: episodes must be >= 1");
    EvalResult res;
    for (std::uint64_t seed : seeds) {
        double total = 0.0;
        for (std::size_t ep = 0; ep < episodes; ++ep) {
            std::vector<double> state = env.reset(derive_seed(seed, "eval-episode", ep));
            while (true) {
                StepResult r = env.step(policy.greedy(state));
                total += r.true_reward();
                state = r.next_state;
                if (r.episode_done) break;
            }
        }
        res.per_seed_mean.push_back(total / static_cast<double>(episodes));
    }
    for (double m : res.per_seed_mean) res.mean += m;
    res.mean /= static_cast<double>(res.per_seed_mean.size());
    if (res.per_seed_mean.size() > 1) {
        double s = 0.0;
        for (double m : res.per_seed_mean) s += (m - res.mean) * (m - res.mean);
        res.stddev = std::sqrt(s / static_cast<double>(res.per_seed_mean.size() - 1));
    }
    return res;
}

}  // namespace iil

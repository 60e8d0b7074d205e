#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "iil/errors.hpp"
#include "iil/rng.hpp"

namespace iil {

struct ActionSpace {
    enum class Kind { discrete, continuous };
    Kind kind = Kind::discrete;
    std::size_t n = 0;    // discrete action count
    std::size_t dim = 0;  // continuous action dimension
    std::vector<double> low, high;

    static ActionSpace make_discrete(std::size_t count) {
        ActionSpace s;
        s.kind = Kind::discrete;
        s.n = count;
        return s;
    }
    static ActionSpace make_continuous(std::vector<double> lo, std::vector<double> hi) {
        ActionSpace s;
        s.kind = Kind::continuous;
        s.dim = lo.size();
        s.low = std::move(lo);
        s.high = std::move(hi);
        return s;
    }
    bool discrete() const { return kind == Kind::discrete; }
    // Width of the action as a flat vector (one-hot for discrete).
    std::size_t encoded_dim() const { return discrete() ? n : dim; }
};

struct Action {
    std::size_t index = 0;            // discrete
    std::vector<double> continuous;   // continuous

    static Action make_discrete(std::size_t i) {
        Action a;
        a.index = i;
        return a;
    }
    static Action make_continuous(std::vector<double> v) {
        Action a;
        a.continuous = std::move(v);
        return a;
    }
};

struct MdpSpec {
    std::size_t state_dim = 0;
    ActionSpace action_space;
    double gamma = 0.99;
    std::size_t max_episode_steps = 0;
    // Per-dimension observation bounds; the reward modules map these to [-1,1].
    std::vector<double> state_low, state_high;
};

namespace detail {
inline bool& true_reward_blocked() {
    thread_local bool blocked = false;
    return blocked;
}
}  // namespace detail

// While alive, any read of StepResult::true_reward throws. The imitation
// rollout path holds one of these so the learner provably never sees the
// environment reward outside evaluation.
class TrueRewardGuard {
public:
    TrueRewardGuard() { detail::true_reward_blocked() = true; }
    ~TrueRewardGuard() { detail::true_reward_blocked() = false; }
    TrueRewardGuard(const TrueRewardGuard&) = delete;
    TrueRewardGuard& operator=(const TrueRewardGuard&) = delete;
};

struct StepResult {
    std::vector<double> next_state;
    bool episode_done = false;
    bool life_lost = false;

    StepResult() = default;
    StepResult(std::vector<double> ns, double reward, bool done, bool lost)
        : next_state(std::move(ns)), episode_done(done), life_lost(lost), true_reward_(reward) {}

    double true_reward() const {
        if (detail::true_reward_blocked())
            throw StateError("true reward read during imitation rollout");
        return true_reward_;
    }

private:
    double true_reward_ = 0.0;
};

class Env {
public:
    virtual ~Env() = default;
    virtual const MdpSpec& spec() const = 0;
    virtual const std::string& id() const = 0;
    virtual std::vector<double> reset(std::uint64_t seed) = 0;
    virtual StepResult step(const Action& action) = 0;
};

// ---------------------------------------------------------------------------
// GridHazard: a multi-life pellet-collection gridworld. Walking onto a hazard
// costs a life and respawns the agent at the start without ending the episode,
// so a demonstration truncated at the first death is a strict prefix of full
// play whenever the expert dies at all.
// ---------------------------------------------------------------------------

struct GridHazardConfig {
    std::size_t width = 8;
    std::size_t height = 8;
    std::size_t pellets = 10;
    std::size_t hazards = 6;
    std::size_t lives = 3;
    std::size_t max_steps = 200;
    // When set, every reset rebuilds this layout regardless of the reset seed
    // (one fixed "game"); otherwise the reset seed picks the layout.
    std::optional<std::uint64_t> fixed_layout_seed;
};

class GridHazardEnv final : public Env {
public:
    explicit GridHazardEnv(GridHazardConfig cfg = {}) : cfg_(cfg) {
        const std::size_t cells = cfg_.width * cfg_.height;
        if (cfg_.pellets + cfg_.hazards + 1 > cells)
            throw ConfigError("grid_hazard: pellets + hazards exceed the board");
        spec_.state_dim = 2 * cells + 2;
        spec_.action_space = ActionSpace::make_discrete(4);
        spec_.max_episode_steps = cfg_.max_steps;
        spec_.state_low.assign(spec_.state_dim, 0.0);
        spec_.state_high.assign(spec_.state_dim, 1.0);
        reset(0);
    }

    const MdpSpec& spec() const override { return spec_; }
    const std::string& id() const override { return id_; }

    std::vector<double> reset(std::uint64_t seed) override {
        const std::uint64_t layout_seed =
            cfg_.fixed_layout_seed ? *cfg_.fixed_layout_seed : seed;
        build_layout(layout_seed);
        agent_ = 0;
        lives_ = cfg_.lives;
        steps_ = 0;
        return encode();
    }

    StepResult step(const Action& action) override {
        if (action.index >= 4) throw DomainError("grid_hazard: action out of space");
        const std::size_t x = agent_ % cfg_.width;
        const std::size_t y = agent_ / cfg_.width;
        std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(x);
        std::ptrdiff_t ny = static_cast<std::ptrdiff_t>(y);
        switch (action.index) {
            case 0: ny -= 1; break;  // up
            case 1: ny += 1; break;  // down
            case 2: nx -= 1; break;  // left
            case 3: nx += 1; break;  // right
        }
        double reward = 0.0;
        bool life_lost = false;
        if (nx >= 0 && ny >= 0 && nx < static_cast<std::ptrdiff_t>(cfg_.width) &&
            ny < static_cast<std::ptrdiff_t>(cfg_.height)) {
            const std::size_t target =
                static_cast<std::size_t>(ny) * cfg_.width + static_cast<std::size_t>(nx);
            if (hazard_[target]) {
                life_lost = true;
                --lives_;
                agent_ = 0;  // respawn
            } else {
                agent_ = target;
                if (pellet_[target]) {
                    pellet_[target] = 0;
                    --pellets_left_;
                    reward = 1.0;
                }
            }
        }
        ++steps_;
        const bool done = lives_ == 0 || pellets_left_ == 0 || steps_ >= cfg_.max_steps;
        return StepResult(encode(), reward, done, life_lost);
    }

    const GridHazardConfig& config() const { return cfg_; }
    std::size_t lives() const { return lives_; }
    std::size_t pellets_left() const { return pellets_left_; }
    std::size_t agent_cell() const { return agent_; }
    const std::vector<std::uint8_t>& pellet_mask() const { return pellet_; }
    const std::vector<std::uint8_t>& hazard_mask() const { return hazard_; }

private:
    void build_layout(std::uint64_t layout_seed) {
        const std::size_t cells = cfg_.width * cfg_.height;
        hazard_.assign(cells, 0);
        pellet_.assign(cells, 0);
        std::vector<std::size_t> order;
        order.reserve(cells - 1);
        for (std::size_t c = 1; c < cells; ++c) order.push_back(c);  // start cell excluded
        Rng rng(layout_seed);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(i)]);
        for (std::size_t i = 0; i < cfg_.hazards; ++i) hazard_[order[i]] = 1;
        for (std::size_t i = 0; i < cfg_.pellets; ++i) pellet_[order[cfg_.hazards + i]] = 1;
        pellets_left_ = cfg_.pellets;
    }

    std::vector<double> encode() const {
        const std::size_t cells = cfg_.width * cfg_.height;
        std::vector<double> s(spec_.state_dim, 0.0);
        s[agent_] = 1.0;
        for (std::size_t c = 0; c < cells; ++c) s[cells + c] = pellet_[c] ? 1.0 : 0.0;
        s[2 * cells] = static_cast<double>(lives_) / static_cast<double>(cfg_.lives);
        s[2 * cells + 1] = static_cast<double>(steps_) / static_cast<double>(cfg_.max_steps);
        return s;
    }

    GridHazardConfig cfg_;
    MdpSpec spec_;
    std::string id_ = "grid_hazard";
    std::vector<std::uint8_t> hazard_, pellet_;
    std::size_t agent_ = 0, lives_ = 0, steps_ = 0, pellets_left_ = 0;
};

// ---------------------------------------------------------------------------
// Pendulum balance: continuous torque control, fixed-step semi-implicit Euler.
// theta = 0 is upright; reward is the negative quadratic cost.
// ---------------------------------------------------------------------------

struct PendulumConfig {
    double torque_bound = 2.0;
    double max_speed = 8.0;
    double dt = 0.05;
    double gravity = 10.0;
    double mass = 1.0;
    double length = 1.0;
    std::size_t max_steps = 200;
};

class PendulumEnv final : public Env {
public:
    explicit PendulumEnv(PendulumConfig cfg = {}) : cfg_(cfg) {
        spec_.state_dim = 3;
        spec_.action_space = ActionSpace::make_continuous({-cfg_.torque_bound}, {cfg_.torque_bound});
        spec_.max_episode_steps = cfg_.max_steps;
        spec_.state_low = {-1.0, -1.0, -cfg_.max_speed};
        spec_.state_high = {1.0, 1.0, cfg_.max_speed};
        reset(0);
    }

    const MdpSpec& spec() const override { return spec_; }
    const std::string& id() const override { return id_; }

    std::vector<double> reset(std::uint64_t seed) override {
        Rng rng(seed);
        theta_ = rng.uniform(-std::numbers::pi, std::numbers::pi);
        theta_dot_ = rng.uniform(-1.0, 1.0);
        steps_ = 0;
        return encode();
    }

    StepResult step(const Action& action) override {
        if (action.continuous.size() != 1)
            throw DomainError("pendulum: action must be a 1-d torque");
        const double u = std::clamp(action.continuous[0], -cfg_.torque_bound, cfg_.torque_bound);
        const double reward = -(theta_ * theta_ + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u);

        const double g = cfg_.gravity, m = cfg_.mass, l = cfg_.length;
        theta_dot_ += (3.0 * g / (2.0 * l) * std::sin(theta_) + 3.0 / (m * l * l) * u) * cfg_.dt;
        theta_dot_ = std::clamp(theta_dot_, -cfg_.max_speed, cfg_.max_speed);
        theta_ = wrap_angle(theta_ + theta_dot_ * cfg_.dt);
        ++steps_;
        return StepResult(encode(), reward, steps_ >= cfg_.max_steps, false);
    }

    double theta() const { return theta_; }
    double theta_dot() const { return theta_dot_; }

    std::vector<double> set_state(double theta, double theta_dot) {
        theta_ = wrap_angle(theta);
        theta_dot_ = std::clamp(theta_dot, -cfg_.max_speed, cfg_.max_speed);
        return encode();
    }

private:
    static double wrap_angle(double a) {
        const double two_pi = 2.0 * std::numbers::pi;
        a = std::fmod(a + std::numbers::pi, two_pi);
        if (a < 0) a += two_pi;
        return a - std::numbers::pi;
    }

    std::vector<double> encode() const {
        return {std::cos(theta_), std::sin(theta_), theta_dot_};
    }

    PendulumConfig cfg_;
    MdpSpec spec_;
    std::string id_ = "pendulum";
    double theta_ = 0.0, theta_dot_ = 0.0;
    std::size_t steps_ = 0;
};

// ---------------------------------------------------------------------------
// Vectorized stepper with deterministic auto-reset.
// ---------------------------------------------------------------------------

class VecEnv {
public:
    VecEnv(std::vector<std::unique_ptr<Env>> envs, std::uint64_t master_seed)
        : envs_(std::move(envs)), reseed_rng_(master_seed) {
        obs_.resize(envs_.size());
        for (std::size_t i = 0; i < envs_.size(); ++i)
            obs_[i] = envs_[i]->reset(reseed_rng_.next_u64());
    }

    std::size_t size() const { return envs_.size(); }
    const MdpSpec& spec() const { return envs_.front()->spec(); }
    const std::vector<double>& obs(std::size_t i) const { return obs_[i]; }
    Env& env(std::size_t i) { return *envs_[i]; }

    // Element-wise step in input order; envs that finish are reset with a
    // fresh seed drawn from the master stream. The StepResult keeps the true
    // successor state; obs() switches to the post-reset state.
    std::vector<StepResult> vec_step(const std::vector<Action>& actions) {
        if (actions.size() != envs_.size())
            throw DimensionError("vec_step: action count != env count");
        std::vector<StepResult> results;
        results.reserve(envs_.size());
        for (std::size_t i = 0; i < envs_.size(); ++i) {
            StepResult r = envs_[i]->step(actions[i]);
            if (r.episode_done)
                obs_[i] = envs_[i]->reset(reseed_rng_.next_u64());
            else
                obs_[i] = r.next_state;
            results.push_back(std::move(r));
        }
        return results;
    }

private:
    std::vector<std::unique_ptr<Env>> envs_;
    Rng reseed_rng_;
    std::vector<std::vector<double>> obs_;
};

// Flat action vector: one-hot for discrete spaces, identity otherwise.
inline std::vector<double> encode_action(const ActionSpace& space, const Action& a) {
    if (space.discrete()) {
        if (a.index >= space.n) throw DomainError("encode_action: index out of space");
        std::vector<double> v(space.n, 0.0);
        v[a.index] = 1.0;
        return v;
    }
    if (a.continuous.size() != space.dim)
        throw DimensionError("encode_action: continuous width mismatch");
    return a.continuous;
}

inline double discounted_return(const std::vector<double>& rewards, double gamma) {
    double acc = 0.0, g = 1.0;
    for (double r : rewards) {
        acc += g * r;
        g *= gamma;
    }
    return acc;
}

}  // namespace iil

#pragma once

// Tiny deterministic MDP for reward-module training tests: four one-hot
// states on a ring, action 0 stays, action 1 advances. Actions are uniquely
// recoverable from (s, s') pairs, which makes inverse-dynamics accuracy and
// reconstruction-error claims exact.

#include <cstdint>
#include <string>
#include <vector>

#include "iil/demo.hpp"
#include "iil/envs.hpp"

namespace iil::test {

class ToyCycleEnv final : public iil::Env {
public:
    ToyCycleEnv() {
        spec_.state_dim = 4;
        spec_.action_space = iil::ActionSpace::make_discrete(2);
        spec_.max_episode_steps = 16;
        spec_.state_low.assign(4, 0.0);
        spec_.state_high.assign(4, 1.0);
    }
    const iil::MdpSpec& spec() const override { return spec_; }
    const std::string& id() const override { return id_; }

    std::vector<double> reset(std::uint64_t seed) override {
        pos_ = seed % 4;
        steps_ = 0;
        return encode();
    }

    iil::StepResult step(const iil::Action& a) override {
        if (a.index >= 2) throw iil::DomainError("toy: bad action");
        if (a.index == 1) pos_ = (pos_ + 1) % 4;
        ++steps_;
        return iil::StepResult(encode(), a.index == 1 ? 1.0 : 0.0,
                               steps_ >= spec_.max_episode_steps, false);
    }

private:
    std::vector<double> encode() const {
        std::vector<double> s(4, 0.0);
        s[pos_] = 1.0;
        return s;
    }

    iil::MdpSpec spec_;
    std::string id_ = "toy_cycle";
    std::size_t pos_ = 0, steps_ = 0;
};

// Scripted demo covering both actions from every state.
inline iil::Demonstration toy_demo(std::size_t episodes = 4, std::uint64_t seed = 3) {
    ToyCycleEnv env;
    int t = 0;
    iil::ActFn policy = [&t](const std::vector<double>&) {
        static const std::size_t seq[5] = {1, 1, 0, 1, 0};
        return iil::Action::make_discrete(seq[t++ % 5]);
    };
    return iil::record(policy, env, iil::Provenance::full_episode, episodes, seed);
}

}  // namespace iil::test

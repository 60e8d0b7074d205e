#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "iil/distributions.hpp"
#include "iil/envs.hpp"
#include "iil/nn.hpp"
#include "iil/rng.hpp"
#include "iil/tensor.hpp"

namespace iil {

struct PolicyArch {
    std::vector<std::size_t> hidden = {64, 64};
    Activation activation = Activation::tanh;
};

// Separate actor and critic MLPs. Discrete heads emit categorical logits;
// continuous heads emit the Gaussian mean with a state-independent learned
// log-std vector initialized to zero.
class PolicyNet {
public:
    PolicyNet() = default;

    PolicyNet(std::size_t state_dim, ActionSpace space, PolicyArch arch, Rng& rng)
        : space_(std::move(space)),
          actor_(state_dim, arch.hidden, space_.encoded_dim(), arch.activation),
          critic_(state_dim, arch.hidden, 1, arch.activation) {
        actor_.init(rng);
        critic_.init(rng);
        if (!space_.discrete()) log_std_ = ParamTensor({space_.dim});
    }

    const ActionSpace& space() const { return space_; }
    Mlp& actor() { return actor_; }
    Mlp& critic() { return critic_; }
    const Mlp& actor() const { return actor_; }
    const Mlp& critic() const { return critic_; }
    ParamTensor& log_std() { return log_std_; }

    std::vector<double> stddev() const {
        std::vector<double> s(log_std_.values.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = std::exp(std::clamp(log_std_.values[i], -10.0, 4.0));
        return s;
    }

    struct ActBatch {
        std::vector<Action> actions;
        std::vector<double> log_probs;
        std::vector<double> values;
    };

    // Stochastic batched action selection for rollouts (no gradients kept).
    ActBatch act(const Matrix& states, Rng& rng) const {
        ActBatch out;
        const Matrix head = actor_.forward(states);
        const Matrix vals = critic_.forward(states);
        out.actions.reserve(states.rows);
        out.log_probs.reserve(states.rows);
        out.values.reserve(states.rows);
        for (std::size_t b = 0; b < states.rows; ++b) {
            if (space_.discrete()) {
                std::vector<double> logits(head.row(b), head.row(b) + space_.n);
                Categorical cat = softmax(logits);
                const std::size_t a = cat.sample(rng);
                out.actions.push_back(Action::make_discrete(a));
                out.log_probs.push_back(std::log(std::max(cat.probs[a], 1e-300)));
            } else {
                const std::vector<double> sd = stddev();
                std::vector<double> a(space_.dim);
                double lp = 0.0;
                for (std::size_t j = 0; j < space_.dim; ++j) {
                    const double mu = head(b, j);
                    a[j] = mu + sd[j] * rng.normal();
                    const double z = (a[j] - mu) / sd[j];
                    lp += -0.5 * z * z - std::log(sd[j]) - 0.5 * kLogTwoPi;
                }
                out.actions.push_back(Action::make_continuous(std::move(a)));
                out.log_probs.push_back(lp);
            }
            out.values.push_back(vals(b, 0));
        }
        return out;
    }

    // Deterministic action: argmax logits / Gaussian mean.
    Action greedy(const std::vector<double>& state) const {
        Matrix x = Matrix::from_row(state);
        const Matrix head = actor_.forward(x);
        if (space_.discrete()) {
            std::vector<double> logits(head.row(0), head.row(0) + space_.n);
            return Action::make_discrete(softmax(logits).argmax());
        }
        return Action::make_continuous(std::vector<double>(head.row(0), head.row(0) + space_.dim));
    }

    double value(const std::vector<double>& state) const {
        Matrix x = Matrix::from_row(state);
        return critic_.forward(x)(0, 0);
    }

    std::vector<NamedParam> params(const std::string& prefix) {
        std::vector<NamedParam> out = actor_.params(prefix + ".actor");
        for (NamedParam& p : critic_.params(prefix + ".critic")) out.push_back(p);
        if (!space_.discrete()) out.push_back({prefix + ".log_std", &log_std_});
        return out;
    }

    void zero_grad() {
        actor_.zero_grad();
        critic_.zero_grad();
        log_std_.zero_grad();
    }

private:
    ActionSpace space_;
    Mlp actor_;
    Mlp critic_;
    ParamTensor log_std_;
};

}  // namespace iil

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "iil/errors.hpp"
#include "iil/rng.hpp"

namespace iil {

inline constexpr double kLogTwoPi = 1.8378770664093454836;  // ln(2*pi)

// Diagonal Gaussian with strictly positive scale.
struct DiagGaussian {
    std::vector<double> mu;
    std::vector<double> sigma;

    std::size_t dim() const { return mu.size(); }

    void validate() const {
        if (mu.size() != sigma.size())
            throw DimensionError("DiagGaussian: mu/sigma dim mismatch");
        for (double s : sigma)
            if (!(s > 0.0)) throw DomainError("DiagGaussian: sigma must be > 0");
    }

    double log_prob(const std::vector<double>& x) const {
        if (x.size() != dim()) throw DimensionError("DiagGaussian::log_prob dim");
        double lp = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) {
            const double z = (x[i] - mu[i]) / sigma[i];
            lp += -0.5 * z * z - std::log(sigma[i]) - 0.5 * kLogTwoPi;
        }
        return lp;
    }

    double entropy() const {
        double h = 0.0;
        for (double s : sigma) h += std::log(s) + 0.5 * (kLogTwoPi + 1.0);
        return h;
    }
};

struct Categorical {
    std::vector<double> probs;

    std::size_t dim() const { return probs.size(); }

    double entropy() const {
        double h = 0.0;
        for (double p : probs)
            if (p > 0.0) h -= p * std::log(p);
        return h;
    }

    // Inverse-CDF sample; deterministic given the rng state.
    std::size_t sample(Rng& rng) const {
        const double u = rng.uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.size() - 1;
    }

    std::size_t argmax() const {
        return static_cast<std::size_t>(
            std::max_element(probs.begin(), probs.end()) - probs.begin());
    }
};

// Max-subtracted softmax; stable for any finite input.
inline Categorical softmax(const std::vector<double>& z) {
    if (z.empty()) throw DimensionError("softmax: empty input");
    for (double v : z)
        if (std::isnan(v)) throw DomainError("softmax: NaN input");
    const double m = *std::max_element(z.begin(), z.end());
    Categorical out;
    out.probs.resize(z.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out.probs[i] = std::exp(z[i] - m);
        sum += out.probs[i];
    }
    for (double& p : out.probs) p /= sum;
    return out;
}

// KL(N(mu, sigma^2) || N(0, I)) in closed form: 0.5 * sum(mu^2 + s^2 - 1 - ln s^2).
inline double kl_gaussian_std_normal(const DiagGaussian& q) {
    q.validate();
    double kl = 0.0;
    for (std::size_t i = 0; i < q.dim(); ++i) {
        const double s2 = q.sigma[i] * q.sigma[i];
        kl += 0.5 * (q.mu[i] * q.mu[i] + s2 - 1.0 - std::log(s2));
    }
    return kl;
}

// KL(N(mu,s^2) || N(mu0,s0^2)), diagonal. Used by the learned-prior head.
inline double kl_gaussian_gaussian(const DiagGaussian& q, const DiagGaussian& p) {
    q.validate();
    p.validate();
    if (q.dim() != p.dim()) throw DimensionError("kl_gaussian_gaussian: dim");
    double kl = 0.0;
    for (std::size_t i = 0; i < q.dim(); ++i) {
        const double s2 = q.sigma[i] * q.sigma[i];
        const double p2 = p.sigma[i] * p.sigma[i];
        const double d = q.mu[i] - p.mu[i];
        kl += std::log(p.sigma[i] / q.sigma[i]) + (s2 + d * d) / (2.0 * p2) - 0.5;
    }
    return kl;
}

// z = mu + sigma * noise; the caller supplies standard-normal noise so the
// sample stays a differentiable function of (mu, sigma).
inline std::vector<double> reparameterize(const DiagGaussian& q,
                                          const std::vector<double>& noise) {
    q.validate();
    if (noise.size() != q.dim()) throw DimensionError("reparameterize: noise dim");
    std::vector<double> z(q.dim());
    for (std::size_t i = 0; i < q.dim(); ++i) z[i] = q.mu[i] + q.sigma[i] * noise[i];
    return z;
}

}  // namespace iil

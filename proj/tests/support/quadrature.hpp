#pragma once

// Numeric-integration oracle for Gaussian KL terms. Composite Simpson over a
// wide bracket; accurate far beyond the 1e-6 tolerances it backs.

#include <cmath>
#include <cstddef>
#include <vector>

namespace iil::test {

template <typename Fn>
double simpson(Fn f, double a, double b, std::size_t intervals) {
    const std::size_t n = intervals % 2 == 0 ? intervals : intervals + 1;
    const double h = (b - a) / static_cast<double>(n);
    double acc = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i)
        acc += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

inline double normal_log_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * 3.14159265358979323846);
}

// KL(N(mu,sigma^2) || N(0,1)) for one dimension by quadrature of q*ln(q/p).
// The log ratio is formed in log space so distant-tail densities cannot
// underflow into inf.
inline double kl_vs_std_normal_quadrature(double mu, double sigma) {
    auto integrand = [&](double x) {
        const double lq = normal_log_pdf(x, mu, sigma);
        const double q = std::exp(lq);
        if (q == 0.0) return 0.0;
        return q * (lq - normal_log_pdf(x, 0.0, 1.0));
    };
    // Mass outside mu +- 12 sigma is ~1e-32; irrelevant at 1e-6 tolerance.
    return simpson(integrand, mu - 12.0 * sigma, mu + 12.0 * sigma, 40000);
}

// Diagonal KL is the sum of per-dimension KLs.
inline double kl_vs_std_normal_quadrature(const std::vector<double>& mu,
                                          const std::vector<double>& sigma) {
    double kl = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        kl += kl_vs_std_normal_quadrature(mu[i], sigma[i]);
    return kl;
}

}  // namespace iil::test

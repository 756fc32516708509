#include "rwfit/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rwfit {

void validate(const RwParams& p) {
    if (!(p.delta > 0.0) || !std::isfinite(p.delta))
        throw std::invalid_argument("RwParams: delta must be positive and finite");
    if (!(p.beta > 0.0) || !std::isfinite(p.beta))
        throw std::invalid_argument("RwParams: beta must be positive and finite");
    if (!std::isfinite(p.gamma))
        throw std::invalid_argument("RwParams: gamma must be finite");
}

Sample::Sample(std::vector<double> v) : values(std::move(v)) {
    std::sort(values.begin(), values.end());
}

double pdf(double x, const RwParams& p) {
    if (x >= p.gamma) return 0.0;
    const double ly = std::log((p.gamma - x) / p.beta);
    const double log_pdf =
        std::log(p.delta / p.beta) + (p.delta - 1.0) * ly - std::exp(p.delta * ly);
    return std::exp(log_pdf);
}

double cdf(double x, const RwParams& p) {
    if (x >= p.gamma) return 1.0;
    const double ly = std::log((p.gamma - x) / p.beta);
    return std::exp(-std::exp(p.delta * ly));
}

double quantile(double u, const RwParams& p) {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("quantile: u must lie in (0, 1)");
    return p.gamma - std::exp(std::log(p.beta) + std::log(-std::log(u)) / p.delta);
}

Sample sample(std::size_t n, const RwParams& p, std::uint64_t seed) {
    std::vector<double> values(n);
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < n; ++i)
        values[i] = quantile(detail::splitmix64_uniform(state), p);
    return Sample(std::move(values));
}

double moment_gm(int k, const RwParams& p) {
    return std::exp(k * std::log(p.beta) + std::lgamma(k / p.delta + 1.0));
}

RawMoments raw_moments(const RwParams& p) {
    const double g1 = moment_gm(1, p);
    const double g2 = moment_gm(2, p);
    const double g3 = moment_gm(3, p);
    RawMoments m;
    m.m1 = p.gamma - g1;
    m.m2 = 2.0 * p.gamma * m.m1 - p.gamma * p.gamma + g2;
    m.m3 = p.gamma * p.gamma * p.gamma - 3.0 * p.gamma * p.gamma * m.m1 +
           3.0 * p.gamma * m.m2 - g3;
    return m;
}

double expected_max(std::size_t n, const RwParams& p) {
    // gamma - X_(n) is the minimum of n Weibull draws: Weibull with scale
    // beta * n^(-1/delta).
    return p.gamma - std::exp(std::log(p.beta) + std::lgamma(1.0 + 1.0 / p.delta) -
                              std::log(static_cast<double>(n)) / p.delta);
}

} // namespace rwfit

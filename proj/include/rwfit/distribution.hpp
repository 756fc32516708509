#pragma once

#include <cstdint>
#include <vector>

namespace rwfit {

// Parameter triple of the reflected Weibull family: support x < gamma,
// density (delta/beta)((gamma-x)/beta)^(delta-1) exp[-((gamma-x)/beta)^delta].
struct RwParams {
    double delta;  // shape, > 0
    double beta;   // scale, > 0
    double gamma;  // location = upper endpoint
};

// Throws std::invalid_argument unless delta > 0, beta > 0, gamma finite.
void validate(const RwParams& p);

// Observations held in ascending order.
struct Sample {
    std::vector<double> values;

    Sample() = default;
    explicit Sample(std::vector<double> v);

    std::size_t n() const { return values.size(); }
    double min() const { return values.front(); }
    double max() const { return values.back(); }
    double spread() const { return values.back() - values.front(); }
};

double pdf(double x, const RwParams& p);
double cdf(double x, const RwParams& p);

// Inverse CDF: gamma - beta * (-ln u)^(1/delta). Throws std::domain_error
// unless 0 < u < 1.
double quantile(double u, const RwParams& p);

// n inversion-sampled draws from a splitmix64 stream keyed by seed,
// returned sorted. Bit-for-bit reproducible across platforms.
Sample sample(std::size_t n, const RwParams& p, std::uint64_t seed);

// E[(gamma - X)^k] = beta^k * Gamma(k/delta + 1), evaluated via log-gamma.
double moment_gm(int k, const RwParams& p);

struct RawMoments {
    double m1;  // E[X]
    double m2;  // E[X^2]
    double m3;  // E[X^3]
};

RawMoments raw_moments(const RwParams& p);

// E[max of n draws] = gamma - beta * Gamma(1 + 1/delta) * n^(-1/delta):
// gamma - X_(n) is the minimum of n Weibull variates, i.e. Weibull with
// scale beta * n^(-1/delta).
double expected_max(std::size_t n, const RwParams& p);

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Uniform on the open interval (0, 1): 53-bit mantissa, offset half a ulp.
inline double splitmix64_uniform(std::uint64_t& state) {
    return ((splitmix64_next(state) >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace detail

} // namespace rwfit

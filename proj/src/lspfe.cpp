#include "rwfit/lspfe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rwfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDeltaLo = 1e-3;
constexpr double kDeltaHi = 1e3;

// Log integrand of the joint density of the normalized order statistics and
// its delta-derivative, at extreme order statistics u < v < 0:
//   L = ln n! + (n-2) ln(v-u) + sum_i [ln delta + (delta-1) ln(-z_i) - (-z_i)^delta]
//   L' = n/delta + sum_i (1 - (-z_i)^delta) ln(-z_i)
// with z_i = u + (v-u) w_i. Nodes where the power term overflows drive L to
// -inf; the quadrature skips their companion values entirely.
detail::LogPair integrand(double u, double v, double delta,
                          const std::vector<double>& w, double log_nfact) {
    const double n = static_cast<double>(w.size());
    double L = log_nfact + (n - 2.0) * std::log(v - u) + n * std::log(delta);
    double Lp = n / delta;
    for (double wi : w) {
        // convex combination: exact at w = 0 and w = 1, and free of the
        // cancellation u + (v-u) suffers when |v| << |u|
        const double z = u * (1.0 - wi) + v * wi;
        const double lz = std::log(-z);
        const double pw = std::exp(delta * lz);
        L += (delta - 1.0) * lz - pw;
        Lp += (1.0 - pw) * lz;
    }
    return {L, Lp};
}

struct PsiResult {
    double log_value;
    double dlog_ddelta;
    double rel_error;
};

// Nested adaptive quadrature of the density integral over u < v < 0, both
// levels through the rational map onto (0,1) and evaluated in log space.
// The derivative ratio rides along on the same node sets.
PsiResult psi_integral(double delta, const WStats& stats,
                       const QuadratureSpec& spec) {
    if (!(delta >= kDeltaLo && delta <= kDeltaHi))
        throw std::domain_error("w_log_likelihood: delta outside [1e-3, 1e3]");
    const std::vector<double>& w = stats.w;
    const double log_nfact = std::lgamma(static_cast<double>(w.size()) + 1.0);

    QuadratureSpec inner_spec = spec;
    QuadratureSpec outer_spec = spec;
    outer_spec.relative_tolerance = std::min(10.0 * spec.relative_tolerance, 0.1);

    bool inner_failed = false;
    double worst_inner = 0.0;
    // Outer variable: xi = (-v)^delta mapped onto (0,1) by xi = t/(1-t).
    // The power map cancels the (-v)^(delta-1) endpoint factor exactly, so
    // the transformed integrand is bounded at t -> 0 for every delta and
    // decays like exp(-xi) at t -> 1.
    auto outer_f = [&](double t) -> detail::LogPair {
        const double om = 1.0 - t;
        const double log_xi = std::log(t) - std::log(om);
        const double v = -std::exp(log_xi / delta);
        const double log_jac_v = -std::log(delta) +
                                 (1.0 / delta - 1.0) * log_xi -
                                 2.0 * std::log(om);
        auto inner_f = [&](double s) -> detail::LogPair {
            const double os = 1.0 - s;
            const double u = v - s / os;
            detail::LogPair lp = integrand(u, v, delta, w, log_nfact);
            lp.log_f += -2.0 * std::log(os);
            return lp;
        };
        detail::LogPairResult inner =
            detail::log_integrate_pair(inner_f, 0.0, 1.0, inner_spec);
        if (!inner.converged && inner.rel_error > 100.0 * spec.relative_tolerance)
            inner_failed = true;
        worst_inner = std::max(worst_inner, inner.rel_error);
        return {inner.log_value + log_jac_v, inner.ratio};
    };
    detail::LogPairResult outer =
        detail::log_integrate_pair(outer_f, 0.0, 1.0, outer_spec);

    const double rel_error = outer.rel_error + worst_inner;
    if (!outer.converged || inner_failed)
        throw QuadratureError("w likelihood quadrature did not converge",
                              outer.log_value, rel_error);
    return PsiResult{outer.log_value, outer.ratio, rel_error};
}

} // namespace

WStats compute_w(const Sample& s) {
    const std::size_t n = s.n();
    if (n < 2 || !(s.spread() > 0.0))
        throw EstimationError("degenerate sample: zero spread");
    std::vector<double> x = s.values;  // ascending
    WStats stats;
    stats.spread = s.spread();
    for (std::size_t i = 1; i < n; ++i) {
        if (x[i] <= x[i - 1]) {
            x[i] = x[i - 1] + 1e-9 * stats.spread;
            stats.ties_jittered = true;
        }
    }
    stats.w.resize(n);
    const double lo = x.front(), hi = x.back();
    for (std::size_t i = 0; i < n; ++i) stats.w[i] = (x[i] - lo) / (hi - lo);
    stats.w.front() = 0.0;
    stats.w.back() = 1.0;
    return stats;
}

WLogLik w_log_likelihood(double delta, const WStats& w,
                         const QuadratureSpec& spec) {
    const PsiResult r = psi_integral(delta, w, spec);
    return WLogLik{r.log_value, r.rel_error};
}

double w_log_likelihood_derivative(double delta, const WStats& w,
                                   const QuadratureSpec& spec) {
    return psi_integral(delta, w, spec).dlog_ddelta;
}

ShapeEstimate estimate_shape(const WStats& w, const QuadratureSpec& spec) {
    if (w.n() <= 2)
        throw EstimationError("n > 2 required (got " + std::to_string(w.n()) + ")");
    int evals = 0;
    MaximizeResult m = maximize_unimodal(
        [&](double log_delta) {
            ++evals;
            return psi_integral(std::exp(log_delta), w, spec).log_value;
        },
        BracketSpec{std::log(kDeltaLo), std::log(kDeltaHi), 1e-5, 200});
    ShapeEstimate est;
    est.delta_hat = std::exp(m.argmax);
    est.boundary = m.at_boundary;
    est.iterations = evals;
    const PsiResult at_max = psi_integral(est.delta_hat, w, spec);
    est.loglik = at_max.log_value;
    est.quadrature_error = at_max.rel_error;
    return est;
}

namespace {

// ln of [sum_i y_i^delta / n]^(1/delta) from the logs of the nonzero y's.
double log_power_mean(const std::vector<double>& log_y, std::size_t n,
                      double delta) {
    double m = -kInf;
    for (double ly : log_y) m = std::max(m, ly);
    double sum = 0.0;
    for (double ly : log_y) sum += std::exp(delta * (ly - m));
    return m + (std::log(sum) - std::log(static_cast<double>(n))) / delta;
}

} // namespace

LocationScale estimate_location_scale(const Sample& s, double delta_hat) {
    if (!(delta_hat > 0.0))
        throw EstimationError("estimate_location_scale: delta must be positive");
    const std::size_t n = s.n();
    LocationScale ls;
    ls.gamma_init = s.max();

    std::vector<double> log_y;
    log_y.reserve(n);
    for (double x : s.values) {
        const double y = ls.gamma_init - x;
        // the maximum observation contributes 0^delta = 0: drop it from the
        // log-space sum (the divisor stays n)
        if (y > 0.0) log_y.push_back(std::log(y));
    }
    if (log_y.empty())
        throw EstimationError("degenerate sample: all observations equal");
    ls.beta_init = std::exp(log_power_mean(log_y, n, delta_hat));

    const double correction =
        std::exp(std::log(ls.beta_init) + std::lgamma(1.0 + 1.0 / delta_hat) -
                 std::log(static_cast<double>(n)) / delta_hat);
    ls.gamma_corrected = ls.gamma_init + correction;

    log_y.clear();
    for (double x : s.values) log_y.push_back(std::log(ls.gamma_corrected - x));
    ls.beta_corrected = std::exp(log_power_mean(log_y, n, delta_hat));
    return ls;
}

LspfeFit fit_lspfe(const Sample& s, const QuadratureSpec& spec) {
    if (s.n() <= 2)
        throw EstimationError("n > 2 required (got " + std::to_string(s.n()) + ")");
    const WStats w = compute_w(s);
    const ShapeEstimate shape = estimate_shape(w, spec);
    const LocationScale ls = estimate_location_scale(s, shape.delta_hat);

    LspfeFit fit;
    fit.diagnostics = LspfeDiagnostics{shape.delta_hat,
                                       ls.gamma_init,
                                       ls.beta_init,
                                       ls.gamma_corrected,
                                       ls.beta_corrected,
                                       shape.loglik,
                                       shape.quadrature_error,
                                       shape.boundary,
                                       w.ties_jittered};
    EstimationResult& r = fit.result;
    r.method = Method::LSPFE;
    r.params = RwParams{shape.delta_hat, ls.beta_corrected, ls.gamma_corrected};
    r.log_likelihood = shape.loglik;
    r.converged = !shape.boundary;
    r.boundary_hit = shape.boundary;
    r.iterations = shape.iterations;
    r.notes = "location correction beta*Gamma(1+1/delta)*n^(-1/delta)";
    if (shape.boundary) r.notes += "; shape search pinned at bracket edge";
    if (w.ties_jittered) r.notes += "; tied observations jittered by 1e-9*spread";
    return fit;
}

} // namespace rwfit

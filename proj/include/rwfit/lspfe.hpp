#pragma once

#include "rwfit/distribution.hpp"
#include "rwfit/estimation.hpp"
#include "rwfit/numerics.hpp"

namespace rwfit {

// Normalized order statistics w_i = (x_(i) - x_(1)) / (x_(n) - x_(1)):
// invariant under positive affine transforms of the data, first entry 0 and
// last entry 1 exactly.
struct WStats {
    std::vector<double> w;
    double spread = 0.0;             // retained for diagnostics only
    bool ties_jittered = false;

    std::size_t n() const { return w.size(); }
};

// Throws EstimationError on zero spread. Exact ties are split by a
// deterministic cumulative jitter of 1e-9 * spread (ties_jittered set).
WStats compute_w(const Sample& s);

struct WLogLik {
    double value;  // ln of the joint density of the interior w's at delta
    double error;  // relative error estimate of the underlying integral
};

// Joint density of (w_2, ..., w_{n-1}) at shape delta, as the double
// integral over the extreme standard order statistics u < v < 0 of
// n! g(u) g(v) (v-u)^(n-2) prod g(u + (v-u) w_i), with g the standard
// reflected Weibull density. Both integration levels run adaptively in log
// space. Throws std::domain_error for delta outside [1e-3, 1e3] and
// QuadratureError (carrying the partial value) on non-convergence.
WLogLik w_log_likelihood(double delta, const WStats& w,
                         const QuadratureSpec& spec = {});

// d/d-delta of w_log_likelihood: quadrature of h' e^h over the same node
// set as the density integral, divided by the density integral.
double w_log_likelihood_derivative(double delta, const WStats& w,
                                   const QuadratureSpec& spec = {});

struct ShapeEstimate {
    double delta_hat;
    bool boundary;       // argmax pinned at an end of [1e-3, 1e3]
    double loglik;
    double quadrature_error;
    int iterations;
};

// Maximizes w_log_likelihood over ln delta in [ln 1e-3, ln 1e3].
ShapeEstimate estimate_shape(const WStats& w, const QuadratureSpec& spec = {});

struct LocationScale {
    double gamma_init;       // max(x)
    double beta_init;        // delta-power mean of gamma_init - x_i
    double gamma_corrected;  // max(x) + beta_init Gamma(1+1/delta) n^(-1/delta)
    double beta_corrected;   // delta-power mean of gamma_corrected - x_i
};

// The power sums run in log space; the zero term (gamma_init - max x) drops
// out of the initial scale, so delta < 1 causes no singularity.
LocationScale estimate_location_scale(const Sample& s, double delta_hat);

struct LspfeDiagnostics {
    double delta_hat;
    double gamma_init;
    double beta_init;
    double gamma_corrected;
    double beta_corrected;
    double loglik_at_max;
    double quadrature_error;
    bool bracket_boundary;
    bool ties_jittered;
};

struct LspfeFit {
    EstimationResult result;
    LspfeDiagnostics diagnostics;
};

LspfeFit fit_lspfe(const Sample& s, const QuadratureSpec& spec = {});

} // namespace rwfit

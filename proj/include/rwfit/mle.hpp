#pragma once

#include "rwfit/distribution.hpp"
#include "rwfit/estimation.hpp"

namespace rwfit {

// n ln delta - n delta ln beta + (delta-1) sum ln(gamma - x_i)
//   - sum ((gamma - x_i)/beta)^delta.
// Returns -infinity when any observation sits at or above gamma.
double log_likelihood(const RwParams& p, const Sample& s);

struct Score {
    double d_delta;
    double d_beta;
    double d_gamma;
};

// Analytic gradient of log_likelihood. The beta component is
// -n delta/beta + (delta/beta) sum ((gamma-x_i)/beta)^delta, i.e. the exact
// derivative of the log-likelihood (certified against finite differences in
// the tests).
Score score(const RwParams& p, const Sample& s);

struct MleOptions {
    int starts = 3;             // perturbed Nelder-Mead starts
    int max_iterations = 500;   // per start
    // Closest allowed relative offset of gamma above max(x). The likelihood
    // is unbounded as gamma -> max(x)+ for delta < 1, so boundary fits are
    // reported at gamma = max(x) + max(boundary_epsilon * spread, a few ulps
    // of the data magnitude) with boundary_hit set.
    double boundary_epsilon = 1e-14;
};

// Maximizes the log-likelihood over (ln delta, ln beta, ln(gamma - max x))
// by multi-start Nelder-Mead, then polishes interior optima with the exact
// two-parameter profile solve and a derivative-sign refinement in the gamma
// direction. Detects the unbounded-likelihood pathology and reports it via
// boundary_hit instead of diverging.
EstimationResult fit_mle(const Sample& s, const MleOptions& options = {});

namespace detail {

// Shape root and implied scale of the two-parameter Weibull likelihood on
// positive data y (used with y_i = gamma - x_i at fixed gamma).
struct Weibull2Fit {
    double delta;
    double log_beta;
    double log_likelihood;
};
Weibull2Fit weibull2_profile(const std::vector<double>& log_y);

} // namespace detail

} // namespace rwfit

#pragma once

#include "rwfit/distribution.hpp"
#include "rwfit/estimation.hpp"

namespace rwfit {

struct SampleMoments {
    double m1 = 0.0;        // mean
    double m2 = 0.0;        // mean of squares
    double m3 = 0.0;        // mean of cubes
    double central2 = 0.0;  // population variance
    double central3 = 0.0;  // third central moment
};

// Raw moments as plain power means; central moments via the standard
// identities. class_width > 0 applies Sheppard's grouping correction
// (variance minus width^2/12) for data that came from interval midpoints.
SampleMoments sample_moments(const Sample& s, double class_width = 0.0);

// Standardized third moment of Y = gamma - X as a function of the shape
// alone: [G3 - 3 G1 G2 + 2 G1^3] / [G2 - G1^2]^(3/2) with
// Gk = Gamma(1 + k/delta). Strictly decreasing; 2 at delta = 1; tends to
// the smallest-extreme-value limit -1.1395 as delta grows.
double shape_equation(double delta);

// Matches the first three moments: solves shape_equation(delta) = -skew,
// then recovers beta and gamma in closed form. Throws EstimationError when
// the skewness target is outside the attainable range over delta in
// [0.02, 500].
EstimationResult fit_mme_from_moments(const SampleMoments& m);

EstimationResult fit_mme(const Sample& s, double class_width = 0.0);

} // namespace rwfit

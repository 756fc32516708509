#include "rwfit/mme.hpp"

#include "rwfit/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace rwfit {

SampleMoments sample_moments(const Sample& s, double class_width) {
    SampleMoments m;
    const double n = static_cast<double>(s.n());
    if (s.n() == 0) return m;
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (double x : s.values) {
        s1 += x;
        s2 += x * x;
        s3 += x * x * x;
    }
    m.m1 = s1 / n;
    m.m2 = s2 / n;
    m.m3 = s3 / n;
    m.central2 = m.m2 - m.m1 * m.m1;
    m.central3 = m.m3 - 3.0 * m.m1 * m.m2 + 2.0 * m.m1 * m.m1 * m.m1;
    if (class_width > 0.0) {
        // Sheppard's correction: midpoint-coded classes inflate the variance
        // by width^2/12; the third central moment needs no adjustment. The
        // raw moments are rebuilt from the corrected central ones so the set
        // stays internally consistent.
        m.central2 -= class_width * class_width / 12.0;
        m.m2 = m.central2 + m.m1 * m.m1;
        m.m3 = m.central3 + 3.0 * m.m1 * m.central2 + m.m1 * m.m1 * m.m1;
    }
    return m;
}

double shape_equation(double delta) {
    if (!(delta > 0.0))
        throw std::invalid_argument("shape_equation: delta must be positive");
    const double lg1 = std::lgamma(1.0 + 1.0 / delta);
    const double a2 = std::lgamma(1.0 + 2.0 / delta) - 2.0 * lg1;
    const double a3 = std::lgamma(1.0 + 3.0 / delta) - 3.0 * lg1;
    // (G3 - 3 G1 G2 + 2 G1^3)/G1^3 = expm1(a3) - 3 expm1(a2); the expm1 forms
    // survive both ends of the bracket, where a2 and a3 are tiny.
    const double numer = std::expm1(a3) - 3.0 * std::expm1(a2);
    const double denom = std::pow(std::expm1(a2), 1.5);
    return numer / denom;
}

EstimationResult fit_mme_from_moments(const SampleMoments& m) {
    if (!(m.central2 > 0.0))
        throw EstimationError("method of moments requires positive variance");
    const double skew = m.central3 / std::pow(m.central2, 1.5);
    const double target = -skew;  // skewness of Y = gamma - X

    const double delta_min = 0.02, delta_max = 500.0;
    // The solver relies on monotonicity; check it rather than assume it.
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 50; ++i) {
        const double d = delta_min * std::pow(delta_max / delta_min, i / 49.0);
        const double g = shape_equation(d);
        if (g > prev + 1e-12)
            throw EstimationError("shape equation not monotone over bracket");
        prev = g;
    }
    const double g_lo = shape_equation(delta_min);
    const double g_hi = shape_equation(delta_max);
    if (target > g_lo || target < g_hi) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "sample skewness %.6g is outside the attainable range "
                      "[%.6g, %.6g] for shape in [%g, %g]",
                      skew, -g_lo, -g_hi, delta_min, delta_max);
        throw EstimationError(buf);
    }

    int evals = 0;
    const double delta = find_root_bracketed(
        [&](double d) {
            ++evals;
            return shape_equation(d) - target;
        },
        BracketSpec{delta_min, delta_max, 1e-12, 300});

    const double lg1 = std::lgamma(1.0 + 1.0 / delta);
    const double a2 = std::lgamma(1.0 + 2.0 / delta) - 2.0 * lg1;
    const double beta =
        std::sqrt(m.central2 / std::expm1(a2)) * std::exp(-lg1);
    const double gamma = m.m1 + beta * std::exp(lg1);

    EstimationResult r;
    r.method = Method::MME;
    r.params = RwParams{delta, beta, gamma};
    r.iterations = evals;

    // The reduction to the skewness equation must reproduce the three raw
    // moments it stands in for.
    const RawMoments check = raw_moments(r.params);
    const double scale2 = std::max(std::abs(m.m2), m.central2);
    const double scale3 = std::max(std::abs(m.m3), std::pow(m.central2, 1.5));
    const double resid = std::max(
        {std::abs(check.m1 - m.m1) / std::max(std::abs(m.m1), std::sqrt(m.central2)),
         std::abs(check.m2 - m.m2) / scale2, std::abs(check.m3 - m.m3) / scale3});
    r.converged = resid < 1e-6;
    if (!r.converged) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "raw-moment residual %.3g exceeds 1e-6", resid);
        r.notes = buf;
    }
    return r;
}

EstimationResult fit_mme(const Sample& s, double class_width) {
    if (s.n() <= 2)
        throw EstimationError("n > 2 required (got " + std::to_string(s.n()) + ")");
    return fit_mme_from_moments(sample_moments(s, class_width));
}

} // namespace rwfit

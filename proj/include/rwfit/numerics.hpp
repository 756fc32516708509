#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwfit {

struct QuadratureSpec {
    double relative_tolerance = 1e-6;
    double absolute_tolerance = 1e-12;
    int max_subdivisions = 2000;
};

struct BracketSpec {
    double lo = 0.0;
    double hi = 1.0;
    double tolerance = 1e-5;
    int max_iterations = 200;
};

// Raised when adaptive subdivision runs out of budget; carries the best
// estimate so callers can decide whether it is still usable.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double best, double err)
        : std::runtime_error(msg), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

// Integral of f over (a, b). a may be -infinity, in which case the domain is
// mapped onto (0, 1) by the rational substitution z = b - t/(1-t) before
// adaptive Gauss-Kronrod subdivision. Throws QuadratureError on
// non-convergence.
QuadratureResult integrate_1d(const std::function<double(double)>& f,
                              double a, double b,
                              const QuadratureSpec& spec = {});

struct MaximizeResult {
    double argmax = 0.0;
    double max_value = 0.0;
    bool at_boundary = false;
    int iterations = 0;
};

// Brent-style maximization (golden section with parabolic steps) of a
// unimodal f on [lo, hi]. Never evaluates f outside the bracket. A maximizer
// within tolerance of an endpoint sets at_boundary instead of erroring.
MaximizeResult maximize_unimodal(const std::function<double(double)>& f,
                                 const BracketSpec& bracket);

// Brent root finder; requires f(lo) and f(hi) to have opposite signs.
double find_root_bracketed(const std::function<double(double)>& f,
                           const BracketSpec& bracket);

// ln(sum of exp(t_i)), overflow-safe via max shift.
double log_sum_exp(const std::vector<double>& terms);

namespace detail {

// Gauss-Kronrod 7-15 panel constants (positive half; node 7 is the center).
extern const double gk15_nodes[8];
extern const double gk15_weights_kronrod[8];
extern const double gk15_weights_gauss[4];

// One value of a log-scale integrand plus a companion value that gets
// averaged against the integrand's weight: used for d/d-theta of
// log(integral of e^f) = (integral of c e^f) / (integral of e^f).
struct LogPair {
    double log_f;
    double companion;
};

struct LogPairResult {
    double log_value;   // ln of the integral of e^f
    double ratio;       // weighted mean of the companion
    double rel_error;   // linear-scale relative error estimate
    bool converged;
};

// Adaptive GK15 integration of e^{f(t)} over [lo, hi] carried out entirely
// in log space (per-panel max shift), together with the companion ratio on
// the same node set. Nodes whose shifted weight underflows contribute
// nothing and their companion value is never touched, so overflowed
// companions at negligible nodes cannot poison the sums.
LogPairResult log_integrate_pair(const std::function<LogPair(double)>& f,
                                 double lo, double hi,
                                 const QuadratureSpec& spec);

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace detail

} // namespace rwfit

#include "rwfit/mle.hpp"

#include "rwfit/mme.hpp"
#include "rwfit/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace rwfit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double log_likelihood(const RwParams& p, const Sample& s) {
    const double n = static_cast<double>(s.n());
    const double log_beta = std::log(p.beta);
    double sum_ly = 0.0, sum_pow = 0.0;
    for (double x : s.values) {
        const double y = p.gamma - x;
        if (!(y > 0.0)) return -kInf;
        const double ly = std::log(y) - log_beta;
        sum_ly += ly;
        sum_pow += std::exp(p.delta * ly);  // overflows to inf -> ll = -inf
    }
    return n * (std::log(p.delta) - log_beta) + (p.delta - 1.0) * sum_ly -
           sum_pow;
}

Score score(const RwParams& p, const Sample& s) {
    const double n = static_cast<double>(s.n());
    const double log_beta = std::log(p.beta);
    double sum_ly = 0.0, sum_pow = 0.0, sum_pow_ly = 0.0, sum_inv = 0.0,
           sum_pow_shifted = 0.0;
    for (double x : s.values) {
        const double y = p.gamma - x;
        const double ly = std::log(y) - log_beta;
        const double pw = std::exp(p.delta * ly);
        sum_ly += ly;
        sum_pow += pw;
        sum_pow_ly += pw * ly;
        sum_inv += 1.0 / y;
        sum_pow_shifted += std::exp((p.delta - 1.0) * ly);
    }
    Score g;
    g.d_delta = n / p.delta + sum_ly - sum_pow_ly;
    g.d_beta = -n * p.delta / p.beta + (p.delta / p.beta) * sum_pow;
    g.d_gamma = (p.delta - 1.0) * sum_inv - (p.delta / p.beta) * sum_pow_shifted;
    return g;
}

namespace detail {

Weibull2Fit weibull2_profile(const std::vector<double>& log_y) {
    const double n = static_cast<double>(log_y.size());
    const double m = *std::max_element(log_y.begin(), log_y.end());
    const double mean_ly =
        std::accumulate(log_y.begin(), log_y.end(), 0.0) / n;

    // Tilted-mean form of the shape equation; terms exp(d*(ly-m)) never
    // exceed 1, so the sums are stable for any d.
    auto eq = [&](double log_d) {
        const double d = std::exp(log_d);
        double s0 = 0.0, s1 = 0.0;
        for (double ly : log_y) {
            const double e = std::exp(d * (ly - m));
            s0 += e;
            s1 += e * ly;
        }
        return s1 / s0 - 1.0 / d - mean_ly;
    };
    const double log_d = find_root_bracketed(
        eq, BracketSpec{std::log(1e-8), std::log(1e8), 1e-13, 300});
    const double d = std::exp(log_d);

    double s0 = 0.0;
    for (double ly : log_y) s0 += std::exp(d * (ly - m));
    Weibull2Fit fit;
    fit.delta = d;
    fit.log_beta = m + std::log(s0 / n) / d;
    double sum_ly = 0.0;
    for (double ly : log_y) sum_ly += ly;
    // At the profile optimum the summed power term equals n exactly.
    fit.log_likelihood =
        n * std::log(d) - n * d * fit.log_beta + (d - 1.0) * sum_ly - n;
    return fit;
}

} // namespace detail

namespace {

// Simple Nelder-Mead minimizer in 3 coordinates.
struct NelderMeadResult {
    std::array<double, 3> x;
    double f;
    int evals;
};

NelderMeadResult nelder_mead(const std::function<double(const std::array<double, 3>&)>& f,
                             std::array<double, 3> start, int max_iterations) {
    constexpr int dim = 3;
    std::array<std::array<double, 3>, dim + 1> xs;
    std::array<double, dim + 1> fs;
    int evals = 0;
    auto eval = [&](const std::array<double, 3>& x) {
        ++evals;
        return f(x);
    };
    xs[0] = start;
    fs[0] = eval(start);
    for (int i = 0; i < dim; ++i) {
        xs[i + 1] = start;
        xs[i + 1][i] += 0.25;
        fs[i + 1] = eval(xs[i + 1]);
    }
    auto order = [&]() {
        for (int i = 0; i <= dim; ++i)
            for (int j = i + 1; j <= dim; ++j)
                if (fs[j] < fs[i]) {
                    std::swap(fs[i], fs[j]);
                    std::swap(xs[i], xs[j]);
                }
    };
    for (int iter = 0; iter < max_iterations; ++iter) {
        order();
        double size = 0.0;
        for (int i = 1; i <= dim; ++i)
            for (int k = 0; k < dim; ++k)
                size = std::max(size, std::abs(xs[i][k] - xs[0][k]));
        if (std::abs(fs[dim] - fs[0]) <= 1e-11 * (1.0 + std::abs(fs[0])) &&
            size <= 1e-9)
            break;
        std::array<double, 3> centroid{0, 0, 0};
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k) centroid[k] += xs[i][k] / dim;
        auto blend = [&](double t) {
            std::array<double, 3> x;
            for (int k = 0; k < dim; ++k)
                x[k] = centroid[k] + t * (xs[dim][k] - centroid[k]);
            return x;
        };
        const auto xr = blend(-1.0);
        const double fr = eval(xr);
        if (fr < fs[0]) {
            const auto xe = blend(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                xs[dim] = xe;
                fs[dim] = fe;
            } else {
                xs[dim] = xr;
                fs[dim] = fr;
            }
        } else if (fr < fs[dim - 1]) {
            xs[dim] = xr;
            fs[dim] = fr;
        } else {
            const bool outside = fr < fs[dim];
            const auto xc = blend(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < std::min(fr, fs[dim])) {
                xs[dim] = xc;
                fs[dim] = fc;
            } else {
                for (int i = 1; i <= dim; ++i) {
                    for (int k = 0; k < dim; ++k)
                        xs[i][k] = xs[0][k] + 0.5 * (xs[i][k] - xs[0][k]);
                    fs[i] = eval(xs[i]);
                }
            }
        }
    }
    order();
    return NelderMeadResult{xs[0], fs[0], evals};
}

struct ProfilePoint {
    double t;
    detail::Weibull2Fit fit;
};

} // namespace

EstimationResult fit_mle(const Sample& s, const MleOptions& options) {
    const std::size_t n = s.n();
    if (n <= 2)
        throw EstimationError("n > 2 required (got " + std::to_string(n) + ")");
    const double max_x = s.max();
    const double spread = s.spread();
    if (!(spread > 0.0))
        throw EstimationError("degenerate sample: all observations equal");

    // Feasibility wall for t = ln(gamma - max x): relative offset plus an
    // absolute floor of a few ulps so gamma - x stays representable.
    const double wall_offset =
        std::max(options.boundary_epsilon * spread,
                 8.0 * std::numeric_limits<double>::epsilon() *
                     std::max(std::abs(max_x), spread));
    const double t_min = std::log(wall_offset);
    const double t_max = std::log(1e3 * spread);

    int total_evals = 0;
    auto objective = [&](const std::array<double, 3>& x) {
        const double d = std::clamp(x[0], -60.0, 60.0);
        const double b = std::clamp(x[1], -300.0, 300.0);
        const double t = std::clamp(x[2], t_min, t_max);
        const double penalty = 1e3 * ((x[0] - d) * (x[0] - d) +
                                      (x[1] - b) * (x[1] - b) +
                                      (x[2] - t) * (x[2] - t));
        const RwParams p{std::exp(d), std::exp(b), max_x + std::exp(t)};
        return -log_likelihood(p, s) + penalty;
    };

    // Moment start when available, textbook fallback otherwise.
    double d0 = 0.0, b0, t0;
    {
        double beta0 = 0.0, gamma0 = 0.0;
        bool have_mme = false;
        try {
            const EstimationResult mme = fit_mme(s);
            d0 = std::log(mme.params.delta);
            beta0 = mme.params.beta;
            gamma0 = mme.params.gamma;
            have_mme = gamma0 > max_x + wall_offset;
        } catch (const EstimationError&) {
        }
        if (!have_mme) {
            const SampleMoments m = sample_moments(s);
            d0 = 0.0;
            beta0 = std::sqrt(std::max(m.central2, 1e-12 * spread * spread));
            gamma0 = max_x + 0.1 * spread;
        }
        d0 = std::clamp(d0, std::log(1e-3), std::log(1e3));
        b0 = std::log(beta0);
        t0 = std::clamp(std::log(gamma0 - max_x), std::log(1e-6 * spread),
                        std::log(10.0 * spread));
    }

    const std::array<std::array<double, 3>, 3> perturbations = {
        std::array<double, 3>{0.0, 0.0, 0.0},
        std::array<double, 3>{0.5, 0.3, -1.0},
        std::array<double, 3>{-0.5, -0.3, 1.0}};
    NelderMeadResult best{{d0, b0, t0}, kInf, 0};
    for (int k = 0; k < std::min<int>(options.starts, 3); ++k) {
        std::array<double, 3> start = {d0 + perturbations[k][0],
                                       b0 + perturbations[k][1],
                                       t0 + perturbations[k][2]};
        start[2] = std::clamp(start[2], std::log(1e-6 * spread), t_max - 1.0);
        NelderMeadResult r = nelder_mead(objective, start, options.max_iterations);
        total_evals += r.evals;
        if (r.f < best.f) best = r;
    }

    auto profile_at = [&](double t) {
        const double gamma = max_x + std::exp(t);
        std::vector<double> log_y;
        log_y.reserve(n);
        for (double x : s.values) log_y.push_back(std::log(gamma - x));
        ++total_evals;
        return ProfilePoint{t, detail::weibull2_profile(log_y)};
    };
    auto result_from = [&](const ProfilePoint& pp, bool boundary,
                           const std::string& notes) {
        EstimationResult r;
        r.method = Method::MLE;
        r.params = RwParams{pp.fit.delta, std::exp(pp.fit.log_beta),
                            max_x + std::exp(pp.t)};
        r.log_likelihood = pp.fit.log_likelihood;
        r.converged = true;
        r.boundary_hit = boundary;
        r.iterations = total_evals;
        r.notes = notes;
        return r;
    };

    const double t_hat = std::clamp(best.x[2], t_min, t_max);
    const double t_wall_zone = std::log(1e-3 * spread);

    if (t_hat < t_wall_zone) {
        // The search slid toward gamma = max(x). Probe the profile
        // likelihood downward: if it keeps rising, the likelihood is
        // unbounded at the wall; otherwise pick up the interior maximum the
        // simplex overshot.
        const int grid_n = 48;
        const double t_top = std::log(0.1 * spread);
        std::vector<ProfilePoint> grid;
        grid.reserve(grid_n);
        int best_idx = 0;
        for (int i = 0; i < grid_n; ++i) {
            const double t = t_top + (t_min - t_top) * i / (grid_n - 1.0);
            grid.push_back(profile_at(t));
            if (grid[i].fit.log_likelihood > grid[best_idx].fit.log_likelihood)
                best_idx = i;
        }
        if (best_idx == grid_n - 1) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "likelihood increases toward gamma = max(x); "
                          "stopped at gamma - max(x) = %.3g",
                          wall_offset);
            return result_from(grid.back(), true, buf);
        }
        // Interior bump: refine between the neighbors of the grid maximum.
        const double lo = grid[std::max(0, best_idx - 1)].t;
        const double hi = grid[std::min(grid_n - 1, best_idx + 1)].t;
        MaximizeResult m = maximize_unimodal(
            [&](double t) { return profile_at(t).fit.log_likelihood; },
            BracketSpec{hi, lo, 1e-9, 120});  // grid runs downward: hi < lo
        return result_from(profile_at(m.argmax), false,
                           "simplex slid toward gamma = max(x); recovered the "
                           "interior optimum");
    }

    // Interior fit: polish with the exact profile in (delta, beta) plus a
    // sign search on d(profile)/dt = e^t * d_gamma (envelope theorem).
    auto slope = [&](const ProfilePoint& pp) {
        const RwParams p{pp.fit.delta, std::exp(pp.fit.log_beta),
                         max_x + std::exp(pp.t)};
        return score(p, s).d_gamma;
    };
    ProfilePoint center = profile_at(t_hat);
    double s_center = slope(center);
    double t_lo = t_hat, t_hi = t_hat;
    bool bracketed = false;
    double step = 0.25;
    for (int k = 0; k < 14 && !bracketed; ++k) {
        if (s_center > 0.0) {
            t_hi = std::min(t_hat + step, t_max);
            if (slope(profile_at(t_hi)) < 0.0) {
                t_lo = std::max(t_hi - step, t_min);
                bracketed = true;
            }
        } else {
            t_lo = std::max(t_hat - step, t_min);
            if (slope(profile_at(t_lo)) > 0.0) {
                t_hi = std::min(t_lo + step, t_max);
                bracketed = true;
            }
        }
        step *= 2.0;
        if (t_hi >= t_max && s_center > 0.0) break;
        if (t_lo <= t_min && s_center < 0.0) break;
    }
    if (bracketed) {
        try {
            const double t_star = find_root_bracketed(
                [&](double t) { return slope(profile_at(t)); },
                BracketSpec{t_lo, t_hi, 1e-11, 200});
            return result_from(profile_at(t_star), false, "");
        } catch (const std::invalid_argument&) {
            // clamping can stale the bracket ends; fall through to the
            // bounded maximization below
            MaximizeResult m = maximize_unimodal(
                [&](double t) { return profile_at(t).fit.log_likelihood; },
                BracketSpec{t_lo, t_hi, 1e-9, 120});
            return result_from(profile_at(m.argmax), false, "");
        }
    }
    if (s_center < 0.0 && t_lo <= t_min) {
        // Monotone decrease all the way down was ruled out above (t_hat is
        // interior), but guard anyway: fall back to a bounded maximization.
        MaximizeResult m = maximize_unimodal(
            [&](double t) { return profile_at(t).fit.log_likelihood; },
            BracketSpec{t_min, t_hat + 1.0, 1e-9, 120});
        return result_from(profile_at(m.argmax), m.at_boundary,
                           m.at_boundary ? "profile maximum at search edge" : "");
    }
    if (s_center > 0.0 && t_hi >= t_max) {
        MaximizeResult m = maximize_unimodal(
            [&](double t) { return profile_at(t).fit.log_likelihood; },
            BracketSpec{t_hat - 1.0, t_max, 1e-9, 120});
        return result_from(profile_at(m.argmax), m.at_boundary,
                           m.at_boundary ? "profile maximum at search edge" : "");
    }
    return result_from(center, false, "simplex optimum (no slope bracket found)");
}

} // namespace rwfit

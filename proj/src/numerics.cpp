#include "rwfit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace rwfit {

namespace detail {

// QUADPACK dqk15 constants (verified against a 30-digit reference).
const double gk15_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
const double gk15_weights_kronrod[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
const double gk15_weights_gauss[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

} // namespace detail

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Panel {
    double lo, hi;
    double integral;  // Kronrod estimate
    double error;     // |Kronrod - Gauss|
};

Panel evaluate_panel(const std::function<double(double)>& f, double lo, double hi) {
    using namespace detail;
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double kron = gk15_weights_kronrod[7] * f(c);
    double gauss = gk15_weights_gauss[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double off = h * gk15_nodes[i];
        const double pair = f(c - off) + f(c + off);
        kron += gk15_weights_kronrod[i] * pair;
        if (i % 2 == 1) gauss += gk15_weights_gauss[i / 2] * pair;
    }
    return Panel{lo, hi, kron * h, std::abs(kron - gauss) * h};
}

} // namespace

QuadratureResult integrate_1d(const std::function<double(double)>& f,
                              double a, double b, const QuadratureSpec& spec) {
    std::function<double(double)> g;
    double lo, hi;
    if (std::isinf(a) && a < 0) {
        // z = b - t/(1-t) maps (0,1) onto (-inf, b); the zero-integrand guard
        // keeps underflowed tails from turning into 0 * inf at t near 1.
        g = [&f, b](double t) {
            const double om = 1.0 - t;
            const double fv = f(b - t / om);
            return fv == 0.0 ? 0.0 : fv / (om * om);
        };
        lo = 0.0;
        hi = 1.0;
    } else {
        g = f;
        lo = a;
        hi = b;
    }

    auto worse = [](const Panel& x, const Panel& y) { return x.error < y.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> heap(worse);

    const int initial = 4;
    double total = 0.0, err = 0.0;
    for (int i = 0; i < initial; ++i) {
        Panel p = evaluate_panel(g, lo + (hi - lo) * i / initial,
                                 lo + (hi - lo) * (i + 1) / initial);
        total += p.integral;
        err += p.error;
        heap.push(p);
    }

    int subdivisions = 0;
    while (err > std::max(spec.relative_tolerance * std::abs(total),
                          spec.absolute_tolerance)) {
        if (subdivisions >= spec.max_subdivisions) {
            throw QuadratureError("integrate_1d: no convergence after " +
                                      std::to_string(spec.max_subdivisions) +
                                      " subdivisions",
                                  total, err);
        }
        Panel worst = heap.top();
        heap.pop();
        total -= worst.integral;
        err -= worst.error;
        const double mid = 0.5 * (worst.lo + worst.hi);
        for (Panel child : {evaluate_panel(g, worst.lo, mid),
                            evaluate_panel(g, mid, worst.hi)}) {
            total += child.integral;
            err += child.error;
            heap.push(child);
        }
        ++subdivisions;
    }
    return QuadratureResult{total, err};
}

MaximizeResult maximize_unimodal(const std::function<double(double)>& f,
                                 const BracketSpec& bracket) {
    // Brent's localmin on -f; never samples outside [lo, hi].
    const double golden = 0.5 * (3.0 - std::sqrt(5.0));
    const double eps = std::sqrt(std::numeric_limits<double>::epsilon());
    double a = bracket.lo, b = bracket.hi;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = -f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    int iter = 0;
    for (; iter < bracket.max_iterations; ++iter) {
        const double m = 0.5 * (a + b);
        const double tol1 = eps * std::abs(x) + bracket.tolerance / 3.0;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;
        double p = 0.0, q = 0.0, r = 0.0;
        bool parabolic = false;
        if (std::abs(e) > tol1) {
            r = (x - w) * (fx - fv);
            q = (x - v) * (fx - fw);
            p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) &&
                p < q * (b - x)) {
                parabolic = true;
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
            }
        }
        if (!parabolic) {
            e = (x < m) ? b - x : a - x;
            d = golden * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
        const double fu = -f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    MaximizeResult res;
    res.argmax = x;
    res.max_value = -fx;
    res.iterations = iter;
    const double edge = 2.0 * bracket.tolerance;
    res.at_boundary = (x - bracket.lo < edge) || (bracket.hi - x < edge);
    return res;
}

double find_root_bracketed(const std::function<double(double)>& f,
                           const BracketSpec& bracket) {
    double a = bracket.lo, b = bracket.hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument(
            "find_root_bracketed: f has the same sign at both bracket ends");
    double c = a, fc = fa;
    double d = b - a, e = d;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < bracket.max_iterations; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * bracket.tolerance;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                                   std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
    }
    return b;
}

double log_sum_exp(const std::vector<double>& terms) {
    double m = -kInf;
    for (double t : terms) m = std::max(m, t);
    if (std::isinf(m) && m < 0) return -kInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

namespace detail {

namespace {

// One GK15 panel of a log-space integrand with companion sums. All linear
// quantities are relative to the panel's own shift shift_m.
struct LogPanel {
    double lo, hi;
    double shift_m;   // max of log_f over the panel's nodes
    double sum_w;     // Kronrod sum of weight * exp(log_f - shift_m) * halfwidth
    double err_w;     // |Kronrod - Gauss| of the same
    double sum_wc;    // companion-weighted Kronrod sum
    double err_wc;
    double sum_wa;    // |companion|-weighted Kronrod sum (scale reference)
};

LogPanel evaluate_log_panel(const std::function<LogPair(double)>& f,
                            double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double logs[15];
    double comps[15];
    double xs[15];
    xs[0] = c;
    for (int i = 0; i < 7; ++i) {
        xs[1 + 2 * i] = c - h * gk15_nodes[i];
        xs[2 + 2 * i] = c + h * gk15_nodes[i];
    }
    double m = -kInf;
    for (int j = 0; j < 15; ++j) {
        LogPair lp = f(xs[j]);
        logs[j] = std::isnan(lp.log_f) ? -kInf : lp.log_f;
        comps[j] = lp.companion;
        m = std::max(m, logs[j]);
    }
    LogPanel p{lo, hi, m, 0.0, 0.0, 0.0, 0.0, 0.0};
    if (std::isinf(m) && m < 0) return p;  // panel is identically zero

    double kron_w = 0.0, gauss_w = 0.0, kron_wc = 0.0, gauss_wc = 0.0,
           kron_wa = 0.0;
    auto accumulate = [&](int j, double wk, double wg) {
        const double shifted = logs[j] - m;
        if (shifted < -745.0) return;  // underflows: skip, never touch comps[j]
        const double weight = std::exp(shifted);
        kron_w += wk * weight;
        gauss_w += wg * weight;
        const double cw = comps[j] * weight;
        kron_wc += wk * cw;
        gauss_wc += wg * cw;
        kron_wa += wk * std::abs(cw);
    };
    accumulate(0, gk15_weights_kronrod[7], gk15_weights_gauss[3]);
    for (int i = 0; i < 7; ++i) {
        const double wg = (i % 2 == 1) ? gk15_weights_gauss[i / 2] : 0.0;
        accumulate(1 + 2 * i, gk15_weights_kronrod[i], wg);
        accumulate(2 + 2 * i, gk15_weights_kronrod[i], wg);
    }
    p.sum_w = kron_w * h;
    p.err_w = std::abs(kron_w - gauss_w) * h;
    p.sum_wc = kron_wc * h;
    p.err_wc = std::abs(kron_wc - gauss_wc) * h;
    p.sum_wa = kron_wa * h;
    return p;
}

} // namespace

LogPairResult log_integrate_pair(const std::function<LogPair(double)>& f,
                                 double lo, double hi,
                                 const QuadratureSpec& spec) {
    std::vector<LogPanel> panels;
    const int initial = 8;
    panels.reserve(initial + 2 * spec.max_subdivisions);
    for (int i = 0; i < initial; ++i)
        panels.push_back(evaluate_log_panel(f, lo + (hi - lo) * i / initial,
                                            lo + (hi - lo) * (i + 1) / initial));

    const double tiny = std::numeric_limits<double>::min();
    LogPairResult res{-kInf, 0.0, 0.0, false};
    for (int subdivisions = 0;; ++subdivisions) {
        double shift = -kInf;
        for (const LogPanel& p : panels) shift = std::max(shift, p.shift_m);
        if (std::isinf(shift) && shift < 0) {
            // integrand is zero everywhere sampled
            return LogPairResult{-kInf, 0.0, 0.0, true};
        }
        double d = 0.0, n = 0.0, a = 0.0, err_d = 0.0, err_n = 0.0;
        for (const LogPanel& p : panels) {
            const double scale = std::exp(p.shift_m - shift);
            if (scale == 0.0) continue;
            d += scale * p.sum_w;
            n += scale * p.sum_wc;
            a += scale * p.sum_wa;
            err_d += scale * p.err_w;
            err_n += scale * p.err_wc;
        }
        res.log_value = (d > 0.0) ? shift + std::log(d) : -kInf;
        res.ratio = (d > 0.0) ? n / d : 0.0;
        res.rel_error = err_d / std::max(d, tiny);

        const double tol_d = std::max(spec.relative_tolerance * d, tiny);
        const double tol_n =
            std::max(spec.relative_tolerance * (std::abs(n) + 0.01 * a), tiny);
        if (err_d <= tol_d && err_n <= tol_n) {
            res.converged = true;
            return res;
        }
        if (subdivisions >= spec.max_subdivisions) return res;

        std::size_t worst = 0;
        double worst_priority = -1.0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            const double scale = std::exp(panels[i].shift_m - shift);
            const double priority =
                scale * (panels[i].err_w / tol_d + panels[i].err_wc / tol_n);
            if (priority > worst_priority) {
                worst_priority = priority;
                worst = i;
            }
        }
        LogPanel split = panels[worst];
        const double mid = 0.5 * (split.lo + split.hi);
        panels[worst] = evaluate_log_panel(f, split.lo, mid);
        panels.push_back(evaluate_log_panel(f, mid, split.hi));
    }
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

} // namespace detail

} // namespace rwfit

#include "rwfit/simulation.hpp"

#include "rwfit/lspfe.hpp"
#include "rwfit/mle.hpp"
#include "rwfit/mme.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rwfit {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

struct FitOutcome {
    RwParams params{1.0, 1.0, 0.0};
    bool boundary = false;
};

} // namespace

std::uint64_t replication_seed(std::uint64_t base, double delta0, int n,
                               int rep) {
    std::uint64_t h = mix64(base ^ std::bit_cast<std::uint64_t>(delta0));
    h = mix64(h ^ static_cast<std::uint64_t>(n));
    h = mix64(h ^ static_cast<std::uint64_t>(rep));
    return h;
}

std::pair<double, double> joint_metrics(const std::array<double, 3>& biases,
                                        const std::array<double, 3>& rmses) {
    const double jb = (biases[0] + biases[1] + biases[2]) / 3.0;
    const double jr = std::sqrt(rmses[0] * rmses[0] + rmses[1] * rmses[1] +
                                rmses[2] * rmses[2]);
    return {jb, jr};
}

namespace {

// Shared replication loop. Errors and non-finite estimates are excluded from
// the averages and counted; accumulation runs in replication order so sums
// are deterministic regardless of how cells are scheduled.
SimCell accumulate_cell(
    const std::function<FitOutcome(const Sample&)>& fit_one, Method method,
    double delta0, int n, const SimConfig& config) {
    SimCell cell;
    cell.method = method;
    cell.delta0 = delta0;
    cell.n = n;
    const RwParams truth{delta0, config.beta_true, config.gamma_true};

    // index order: location, shape, scale
    double err_sum[3] = {0.0, 0.0, 0.0};
    double err_sq[3] = {0.0, 0.0, 0.0};
    int used = 0;
    for (int rep = 0; rep < config.replications; ++rep) {
        const std::uint64_t seed =
            replication_seed(config.base_seed, delta0, n, rep);
        const Sample s = sample(static_cast<std::size_t>(n), truth, seed);
        FitOutcome out;
        bool ok = true;
        try {
            out = fit_one(s);
        } catch (const QuadratureError&) {
            ok = false;
        } catch (const EstimationError&) {
            ok = false;
        } catch (const std::domain_error&) {
            ok = false;
        } catch (const std::invalid_argument&) {
            ok = false;
        }
        if (ok && !(std::isfinite(out.params.delta) &&
                    std::isfinite(out.params.beta) &&
                    std::isfinite(out.params.gamma)))
            ok = false;
        if (!ok) {
            ++cell.failure_count;
            continue;
        }
        if (out.boundary) ++cell.boundary_count;
        const double e[3] = {out.params.gamma - truth.gamma,
                             out.params.delta - truth.delta,
                             out.params.beta - truth.beta};
        for (int k = 0; k < 3; ++k) {
            err_sum[k] += e[k];
            err_sq[k] += e[k] * e[k];
        }
        ++used;
    }
    if (used == 0) return cell;  // available stays false

    cell.available = true;
    const double m = static_cast<double>(used);
    cell.bias_location = err_sum[0] / m;
    cell.bias_shape = err_sum[1] / m;
    cell.bias_scale = err_sum[2] / m;
    cell.rmse_location = std::sqrt(err_sq[0] / m);
    cell.rmse_shape = std::sqrt(err_sq[1] / m);
    cell.rmse_scale = std::sqrt(err_sq[2] / m);
    auto [jb, jr] = joint_metrics(
        {cell.bias_location, cell.bias_shape, cell.bias_scale},
        {cell.rmse_location, cell.rmse_shape, cell.rmse_scale});
    cell.joint_bias = jb;
    cell.joint_rmse = jr;
    return cell;
}

} // namespace

SimCell run_cell(Method method, double delta0, int n, const SimConfig& config) {
    std::function<FitOutcome(const Sample&)> fit_one;
    switch (method) {
        case Method::MLE:
            fit_one = [](const Sample& s) {
                const EstimationResult r = fit_mle(s);
                return FitOutcome{r.params, r.boundary_hit};
            };
            break;
        case Method::MME:
            fit_one = [](const Sample& s) {
                const EstimationResult r = fit_mme(s);
                return FitOutcome{r.params, r.boundary_hit};
            };
            break;
        case Method::LSPFE:
            fit_one = [&config](const Sample& s) {
                const LspfeFit f = fit_lspfe(s, config.quadrature);
                return FitOutcome{f.result.params, f.result.boundary_hit};
            };
            break;
    }
    return accumulate_cell(fit_one, method, delta0, n, config);
}

SimCell run_cell_custom(const Fitter& fit, double delta0, int n,
                        const SimConfig& config) {
    return accumulate_cell(
        [&fit](const Sample& s) { return FitOutcome{fit(s), false}; },
        Method::MLE, delta0, n, config);
}

SimReport run_simulation(const SimConfig& config) {
    if (config.replications < 1)
        throw std::invalid_argument("replications must be >= 1");
    for (double d : config.delta_values)
        if (!(d > 0.0))
            throw std::invalid_argument("all shape values must be positive");
    SimReport report;
    report.config = config;
    for (double delta0 : config.delta_values)
        for (int n : config.n_values)
            for (Method method : config.methods)
                report.cells.push_back(run_cell(method, delta0, n, config));
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

std::string render_table_csv(const SimReport& report) {
    std::ostringstream out;
    out << "delta,n,method,location_bias,location_rmse,shape_bias,shape_rmse,"
           "scale_bias,scale_rmse,joint_bias,joint_rmse,failures\n";
    for (const SimCell& c : report.cells) {
        out << fmt(c.delta0) << ',' << c.n << ',' << to_string(c.method);
        if (c.available) {
            const double vals[8] = {c.bias_location, c.rmse_location,
                                    c.bias_shape,    c.rmse_shape,
                                    c.bias_scale,    c.rmse_scale,
                                    c.joint_bias,    c.joint_rmse};
            for (double v : vals) out << ',' << fmt(v);
        } else {
            for (int k = 0; k < 8; ++k) out << ",nan";
        }
        out << ',' << c.failure_count << '\n';
    }
    return out.str();
}

std::string render_table_text(const SimReport& report) {
    std::ostringstream out;
    double current_delta = std::numeric_limits<double>::quiet_NaN();
    char line[256];
    for (const SimCell& c : report.cells) {
        if (!(c.delta0 == current_delta)) {
            current_delta = c.delta0;
            out << "shape delta = " << fmt(c.delta0) << "\n";
            out << "     n method   loc.bias  loc.rmse shape.bias shape.rmse"
                   " scale.bias scale.rmse joint.bias joint.rmse fail\n";
        }
        if (c.available) {
            std::snprintf(line, sizeof line,
                          "  %4d %-6s %9.4g %9.4g %10.4g %10.4g %10.4g %10.4g "
                          "%10.4g %10.4g %4d\n",
                          c.n, to_string(c.method).c_str(), c.bias_location,
                          c.rmse_location, c.bias_shape, c.rmse_shape,
                          c.bias_scale, c.rmse_scale, c.joint_bias,
                          c.joint_rmse, c.failure_count);
        } else {
            std::snprintf(line, sizeof line,
                          "  %4d %-6s %9s %9s %10s %10s %10s %10s %10s %10s "
                          "%4d\n",
                          c.n, to_string(c.method).c_str(), "-", "-", "-", "-",
                          "-",
                          "-", "-", "-", c.failure_count);
        }
        out << line;
    }
    return out.str();
}

std::vector<SimCell> read_sim_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    std::vector<SimCell> cells;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line.rfind("delta,n,method,", 0) != 0)
                throw std::runtime_error(
                    "simulation csv: unexpected header on line 1");
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 12)
            throw std::runtime_error("simulation csv line " +
                                     std::to_string(lineno) +
                                     ": expected 12 fields, got " +
                                     std::to_string(fields.size()));
        SimCell c;
        try {
            c.delta0 = std::stod(fields[0]);
            c.n = std::stoi(fields[1]);
            c.method = method_from_string(fields[2]);
            c.bias_location = std::stod(fields[3]);
            c.rmse_location = std::stod(fields[4]);
            c.bias_shape = std::stod(fields[5]);
            c.rmse_shape = std::stod(fields[6]);
            c.bias_scale = std::stod(fields[7]);
            c.rmse_scale = std::stod(fields[8]);
            c.joint_bias = std::stod(fields[9]);
            c.joint_rmse = std::stod(fields[10]);
            c.failure_count = std::stoi(fields[11]);
        } catch (const std::exception&) {
            throw std::runtime_error("simulation csv line " +
                                     std::to_string(lineno) +
                                     ": malformed value");
        }
        c.available = std::isfinite(c.joint_rmse);
        cells.push_back(c);
    }
    return cells;
}

} // namespace rwfit

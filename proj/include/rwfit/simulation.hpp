#pragma once

#include "rwfit/distribution.hpp"
#include "rwfit/estimation.hpp"
#include "rwfit/numerics.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace rwfit {

struct SimConfig {
    std::vector<double> delta_values = {0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<int> n_values = {20, 50, 100};
    int replications = 100;
    double beta_true = 10.0;
    double gamma_true = 0.0;
    std::vector<Method> methods = {Method::LSPFE, Method::MLE, Method::MME};
    std::uint64_t base_seed = 20250819;
    QuadratureSpec quadrature{};
};

struct SimCell {
    Method method = Method::MLE;
    double delta0 = 0.0;
    int n = 0;
    double bias_location = 0.0, bias_shape = 0.0, bias_scale = 0.0;
    double rmse_location = 0.0, rmse_shape = 0.0, rmse_scale = 0.0;
    double joint_bias = 0.0;
    double joint_rmse = 0.0;
    int failure_count = 0;
    int boundary_count = 0;
    bool available = false;  // false when every replication failed
};

struct SimReport {
    SimConfig config;
    std::vector<SimCell> cells;  // ordered delta-major, then n, then method
};

// Replication seed derived by hashing (base, delta0, n, rep) but NOT the
// method, so all methods see identical samples within a replication
// (common random numbers).
std::uint64_t replication_seed(std::uint64_t base, double delta0, int n, int rep);

// joint bias = mean of the three biases; joint RMSE = Euclidean norm of the
// three RMSEs (root of the trace of the MSE matrix).
std::pair<double, double> joint_metrics(const std::array<double, 3>& biases,
                                        const std::array<double, 3>& rmses);

// One (method, delta0, n) cell: replications draw common samples, failures
// (estimation errors, non-finite parameters) are excluded and counted.
SimCell run_cell(Method method, double delta0, int n, const SimConfig& config);

// Same loop with an arbitrary fitter; lets tests substitute stub estimators.
using Fitter = std::function<RwParams(const Sample&)>;
SimCell run_cell_custom(const Fitter& fit, double delta0, int n,
                        const SimConfig& config);

SimReport run_simulation(const SimConfig& config);

// One row per (delta, n, method); metric columns location/shape/scale/joint
// each as bias then RMSE.
std::string render_table_csv(const SimReport& report);
std::string render_table_text(const SimReport& report);

// Parses render_table_csv output back into cells (config not recoverable).
std::vector<SimCell> read_sim_csv(const std::string& csv_text);

} // namespace rwfit

#pragma once

#include "rwfit/distribution.hpp"
#include "rwfit/estimation.hpp"
#include "rwfit/lspfe.hpp"
#include "rwfit/simulation.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwfit {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Interval-frequency data (ascending, non-overlapping classes).
struct GroupedSample {
    std::vector<std::pair<double, double>> intervals;
    std::vector<long> frequencies;
    long total = 0;
};

// One numeric column; an optional header row must be named "value".
// Unparseable rows raise IoError naming the line.
Sample read_raw_csv(const std::string& path);

// Columns lower,upper,frequency with a header row.
GroupedSample read_grouped_csv(const std::string& path);

// Midpoint expansion: each interval's midpoint repeated frequency times.
Sample expand_grouped(const GroupedSample& g);

// Common class width when all intervals share one (within rounding),
// 0 otherwise. Drives the grouped-moment correction.
double uniform_class_width(const GroupedSample& g);

// Kolmogorov-Smirnov distance between the sample's empirical CDF and F.
double ks_statistic(const Sample& s, const std::function<double(double)>& F);

struct MethodReport {
    EstimationResult estimate;
    std::optional<LspfeDiagnostics> diagnostics;  // LSPFE only
    double ks = 0.0;
};

struct FitReport {
    int schema_version = 1;
    std::string tool_version;
    std::string timestamp;
    std::string input_path;
    std::string format;  // "raw" | "grouped"
    bool negated = false;
    std::size_t n = 0;
    std::vector<MethodReport> results;
};

std::string serialize(const FitReport& report);
FitReport parse_fit_report(const std::string& json_text);

std::string serialize(const SimConfig& config);
SimConfig parse_sim_config(const std::string& json_text);

struct FitCommand {
    std::string input;
    std::string format = "raw";        // raw | grouped
    std::string method = "all";        // mle | mme | lspfe | all
    bool negate = false;
    std::string output;                // JSON report path (optional)
    std::string plot_data;             // CSV path (optional)
};

struct SimulateCommand {
    std::string config_path;           // JSON SimConfig (optional)
    std::string output;                // CSV path (optional; table text goes to stdout)
    // Flag overrides; applied on top of the config file when both given.
    std::optional<std::vector<double>> delta_values;
    std::optional<std::vector<int>> n_values;
    std::optional<int> replications;
    std::optional<double> beta_true;
    std::optional<double> gamma_true;
    std::optional<std::vector<std::string>> methods;
    std::optional<std::uint64_t> seed;         // flag; beats env
    std::optional<std::uint64_t> env_seed;     // RWFIT_SEED
};

// Exit codes: 0 success, 1 I/O or configuration error, 2 fit failure.
int cmd_fit(const FitCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateCommand& cmd, std::ostream& out, std::ostream& err);

} // namespace rwfit

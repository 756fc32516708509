#include "rwfit/io.hpp"

#include "rwfit/mle.hpp"
#include "rwfit/mme.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

namespace rwfit {

namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "1.0.0";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool parse_double(const std::string& token, double& out) {
    const std::string t = trim(token);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

} // namespace

Sample read_raw_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<double> values;
    std::string line;
    int lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        double v;
        if (first_content) {
            first_content = false;
            if (lower(t) == "value") continue;  // optional header
        }
        if (!parse_double(t, v))
            throw IoError(path + " line " + std::to_string(lineno) +
                          ": cannot parse '" + t + "' as a number");
        values.push_back(v);
    }
    if (values.empty()) throw IoError(path + ": no data rows");
    return Sample(std::move(values));
}

GroupedSample read_grouped_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    GroupedSample g;
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        std::vector<std::string> fields = split_csv_line(t);
        if (!saw_header) {
            if (fields.size() != 3 || lower(trim(fields[0])) != "lower" ||
                lower(trim(fields[1])) != "upper" ||
                lower(trim(fields[2])) != "frequency")
                throw IoError(path + " line " + std::to_string(lineno) +
                              ": expected header lower,upper,frequency");
            saw_header = true;
            continue;
        }
        if (fields.size() != 3)
            throw IoError(path + " line " + std::to_string(lineno) +
                          ": expected 3 fields, got " +
                          std::to_string(fields.size()));
        double lo, hi, freq;
        if (!parse_double(fields[0], lo) || !parse_double(fields[1], hi) ||
            !parse_double(fields[2], freq))
            throw IoError(path + " line " + std::to_string(lineno) +
                          ": cannot parse row '" + t + "'");
        if (!(hi > lo))
            throw IoError(path + " line " + std::to_string(lineno) +
                          ": zero-width or inverted interval");
        if (!(freq >= 0.0) || freq != std::floor(freq))
            throw IoError(path + " line " + std::to_string(lineno) +
                          ": frequency must be a nonnegative integer");
        if (!g.intervals.empty() && lo < g.intervals.back().second - 1e-12)
            throw IoError(path + " line " + std::to_string(lineno) +
                          ": intervals overlap or are out of order");
        g.intervals.emplace_back(lo, hi);
        g.frequencies.push_back(static_cast<long>(freq));
        g.total += static_cast<long>(freq);
    }
    if (!saw_header) throw IoError(path + ": empty file");
    if (g.intervals.empty()) throw IoError(path + ": no data rows");
    return g;
}

Sample expand_grouped(const GroupedSample& g) {
    if (g.total <= 0) throw IoError("grouped sample has zero total frequency");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(g.total));
    for (std::size_t i = 0; i < g.intervals.size(); ++i) {
        const double mid = 0.5 * (g.intervals[i].first + g.intervals[i].second);
        for (long k = 0; k < g.frequencies[i]; ++k) values.push_back(mid);
    }
    return Sample(std::move(values));
}

double uniform_class_width(const GroupedSample& g) {
    if (g.intervals.empty()) return 0.0;
    const double w0 = g.intervals[0].second - g.intervals[0].first;
    for (const auto& [lo, hi] : g.intervals)
        if (std::abs((hi - lo) - w0) > 1e-9 * std::max(1.0, std::abs(w0)))
            return 0.0;
    return w0;
}

double ks_statistic(const Sample& s, const std::function<double(double)>& F) {
    const double n = static_cast<double>(s.n());
    double d = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i) {
        const double f = F(s.values[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d;
}

namespace {

json to_json(const RwParams& p) {
    return json{{"delta", p.delta}, {"beta", p.beta}, {"gamma", p.gamma}};
}

RwParams params_from_json(const json& j) {
    return RwParams{j.at("delta").get<double>(), j.at("beta").get<double>(),
                    j.at("gamma").get<double>()};
}

json to_json(const MethodReport& r) {
    json j{{"method", to_string(r.estimate.method)},
           {"params", to_json(r.estimate.params)},
           {"converged", r.estimate.converged},
           {"boundary_hit", r.estimate.boundary_hit},
           {"iterations", r.estimate.iterations},
           {"notes", r.estimate.notes},
           {"ks", r.ks}};
    if (r.estimate.log_likelihood)
        j["log_likelihood"] = *r.estimate.log_likelihood;
    if (r.diagnostics) {
        const LspfeDiagnostics& d = *r.diagnostics;
        j["diagnostics"] = json{{"delta_hat", d.delta_hat},
                                {"gamma_init", d.gamma_init},
                                {"beta_init", d.beta_init},
                                {"gamma_corrected", d.gamma_corrected},
                                {"beta_corrected", d.beta_corrected},
                                {"loglik_at_max", d.loglik_at_max},
                                {"quadrature_error", d.quadrature_error},
                                {"bracket_boundary", d.bracket_boundary},
                                {"ties_jittered", d.ties_jittered}};
    }
    return j;
}

MethodReport method_report_from_json(const json& j) {
    MethodReport r;
    r.estimate.method = method_from_string(j.at("method").get<std::string>());
    r.estimate.params = params_from_json(j.at("params"));
    if (j.contains("log_likelihood"))
        r.estimate.log_likelihood = j.at("log_likelihood").get<double>();
    r.estimate.converged = j.at("converged").get<bool>();
    r.estimate.boundary_hit = j.at("boundary_hit").get<bool>();
    r.estimate.iterations = j.at("iterations").get<int>();
    r.estimate.notes = j.at("notes").get<std::string>();
    r.ks = j.at("ks").get<double>();
    if (j.contains("diagnostics")) {
        const json& d = j.at("diagnostics");
        r.diagnostics = LspfeDiagnostics{
            d.at("delta_hat").get<double>(),
            d.at("gamma_init").get<double>(),
            d.at("beta_init").get<double>(),
            d.at("gamma_corrected").get<double>(),
            d.at("beta_corrected").get<double>(),
            d.at("loglik_at_max").get<double>(),
            d.at("quadrature_error").get<double>(),
            d.at("bracket_boundary").get<bool>(),
            d.at("ties_jittered").get<bool>()};
    }
    return r;
}

} // namespace

std::string serialize(const FitReport& report) {
    json j{{"schema_version", report.schema_version},
           {"tool_version", report.tool_version},
           {"timestamp", report.timestamp},
           {"input_path", report.input_path},
           {"format", report.format},
           {"negated", report.negated},
           {"n", report.n}};
    j["results"] = json::array();
    for (const MethodReport& r : report.results) j["results"].push_back(to_json(r));
    return j.dump(2) + "\n";
}

FitReport parse_fit_report(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw IoError(std::string("invalid fit report JSON: ") + e.what());
    }
    try {
        FitReport r;
        r.schema_version = j.at("schema_version").get<int>();
        if (r.schema_version != 1)
            throw IoError("unsupported fit report schema_version " +
                          std::to_string(r.schema_version));
        r.tool_version = j.at("tool_version").get<std::string>();
        r.timestamp = j.at("timestamp").get<std::string>();
        r.input_path = j.at("input_path").get<std::string>();
        r.format = j.at("format").get<std::string>();
        r.negated = j.at("negated").get<bool>();
        r.n = j.at("n").get<std::size_t>();
        for (const json& jr : j.at("results"))
            r.results.push_back(method_report_from_json(jr));
        return r;
    } catch (const json::exception& e) {
        throw IoError(std::string("invalid fit report JSON: ") + e.what());
    }
}

std::string serialize(const SimConfig& config) {
    json methods = json::array();
    for (Method m : config.methods) methods.push_back(to_string(m));
    json j{{"schema_version", 1},
           {"delta_values", config.delta_values},
           {"n_values", config.n_values},
           {"replications", config.replications},
           {"beta_true", config.beta_true},
           {"gamma_true", config.gamma_true},
           {"methods", methods},
           {"base_seed", config.base_seed},
           {"quadrature",
            json{{"relative_tolerance", config.quadrature.relative_tolerance},
                 {"absolute_tolerance", config.quadrature.absolute_tolerance},
                 {"max_subdivisions", config.quadrature.max_subdivisions}}}};
    return j.dump(2) + "\n";
}

SimConfig parse_sim_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw IoError(std::string("invalid simulation config JSON: ") + e.what());
    }
    SimConfig c;
    try {
        if (j.contains("schema_version") &&
            j.at("schema_version").get<int>() != 1)
            throw IoError("unsupported simulation config schema_version");
        if (j.contains("delta_values"))
            c.delta_values = j.at("delta_values").get<std::vector<double>>();
        if (j.contains("n_values"))
            c.n_values = j.at("n_values").get<std::vector<int>>();
        if (j.contains("replications"))
            c.replications = j.at("replications").get<int>();
        if (j.contains("beta_true"))
            c.beta_true = j.at("beta_true").get<double>();
        if (j.contains("gamma_true"))
            c.gamma_true = j.at("gamma_true").get<double>();
        if (j.contains("methods")) {
            c.methods.clear();
            for (const json& m : j.at("methods"))
                c.methods.push_back(method_from_string(m.get<std::string>()));
        }
        if (j.contains("base_seed"))
            c.base_seed = j.at("base_seed").get<std::uint64_t>();
        if (j.contains("quadrature")) {
            const json& q = j.at("quadrature");
            if (q.contains("relative_tolerance"))
                c.quadrature.relative_tolerance =
                    q.at("relative_tolerance").get<double>();
            if (q.contains("absolute_tolerance"))
                c.quadrature.absolute_tolerance =
                    q.at("absolute_tolerance").get<double>();
            if (q.contains("max_subdivisions"))
                c.quadrature.max_subdivisions =
                    q.at("max_subdivisions").get<int>();
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("invalid simulation config JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("invalid simulation config: ") + e.what());
    }
    return c;
}

namespace {

struct LoadedData {
    Sample sample{std::vector<double>{0.0}};
    double class_width = 0.0;  // 0 for raw input
};

LoadedData load_input(const FitCommand& cmd) {
    LoadedData data;
    if (cmd.format == "raw") {
        data.sample = read_raw_csv(cmd.input);
    } else {
        const GroupedSample g = read_grouped_csv(cmd.input);
        data.sample = expand_grouped(g);
        data.class_width = uniform_class_width(g);
    }
    if (cmd.negate) {
        std::vector<double> v = data.sample.values;
        for (double& x : v) x = -x;
        data.sample = Sample(std::move(v));
    }
    return data;
}

std::string build_plot_csv(const Sample& s,
                           const std::vector<MethodReport>& results) {
    double hi = s.max();
    for (const MethodReport& r : results)
        hi = std::max(hi, r.estimate.params.gamma);
    const double lo = s.min() - 0.05 * s.spread();
    const int points = 200;

    std::ostringstream out;
    out << "x,empirical_cdf";
    for (const MethodReport& r : results)
        out << ",fitted_cdf_" << to_string(r.estimate.method);
    for (const MethodReport& r : results)
        out << ",fitted_pdf_" << to_string(r.estimate.method);
    out << "\n";

    char buf[40];
    const double n = static_cast<double>(s.n());
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        const auto it =
            std::upper_bound(s.values.begin(), s.values.end(), x);
        const double ecdf = static_cast<double>(it - s.values.begin()) / n;
        std::snprintf(buf, sizeof buf, "%.10g", x);
        out << buf;
        std::snprintf(buf, sizeof buf, "%.10g", ecdf);
        out << ',' << buf;
        for (const MethodReport& r : results) {
            std::snprintf(buf, sizeof buf, "%.10g", cdf(x, r.estimate.params));
            out << ',' << buf;
        }
        for (const MethodReport& r : results) {
            std::snprintf(buf, sizeof buf, "%.10g", pdf(x, r.estimate.params));
            out << ',' << buf;
        }
        out << "\n";
    }
    return out.str();
}

void print_fit_summary(const FitReport& report, std::ostream& out) {
    out << "input: " << report.input_path << " (" << report.format
        << ", n = " << report.n << (report.negated ? ", negated" : "")
        << ")\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-7s %12s %12s %12s %10s\n", "method",
                  "shape", "scale", "location", "ks");
    out << line;
    for (const MethodReport& r : report.results) {
        std::snprintf(line, sizeof line, "%-7s %12.6g %12.6g %12.6g %10.4g\n",
                      to_string(r.estimate.method).c_str(),
                      r.estimate.params.delta, r.estimate.params.beta,
                      r.estimate.params.gamma, r.ks);
        out << line;
        if (!r.estimate.notes.empty())
            out << "        note: " << r.estimate.notes << "\n";
    }
}

} // namespace

int cmd_fit(const FitCommand& cmd, std::ostream& out, std::ostream& err) {
    if (cmd.format != "raw" && cmd.format != "grouped") {
        err << "error: --format must be raw or grouped (got '" << cmd.format
            << "')\n";
        return 1;
    }
    std::vector<Method> methods;
    if (cmd.method == "all") {
        methods = {Method::MLE, Method::MME, Method::LSPFE};
    } else {
        try {
            methods.push_back(method_from_string(cmd.method));
        } catch (const std::invalid_argument&) {
            err << "error: --method must be mle, mme, lspfe or all (got '"
                << cmd.method << "')\n";
            return 1;
        }
    }

    LoadedData data;
    try {
        data = load_input(cmd);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    FitReport report;
    report.tool_version = kToolVersion;
    report.timestamp = iso_timestamp();
    report.input_path = cmd.input;
    report.format = cmd.format;
    report.negated = cmd.negate;
    report.n = data.sample.n();
    try {
        for (Method m : methods) {
            MethodReport mr;
            switch (m) {
                case Method::MLE:
                    mr.estimate = fit_mle(data.sample);
                    break;
                case Method::MME:
                    mr.estimate = fit_mme(data.sample, data.class_width);
                    break;
                case Method::LSPFE: {
                    const LspfeFit f = fit_lspfe(data.sample);
                    mr.estimate = f.result;
                    mr.diagnostics = f.diagnostics;
                    break;
                }
            }
            const RwParams p = mr.estimate.params;
            mr.ks = ks_statistic(data.sample,
                                 [p](double x) { return cdf(x, p); });
            report.results.push_back(std::move(mr));
        }
    } catch (const EstimationError& e) {
        err << "fit failed: " << e.what() << "\n";
        return 2;
    } catch (const QuadratureError& e) {
        err << "fit failed: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "fit failed: " << e.what() << "\n";
        return 2;
    }

    try {
        if (!cmd.output.empty()) write_file(cmd.output, serialize(report));
        if (!cmd.plot_data.empty())
            write_file(cmd.plot_data,
                       build_plot_csv(data.sample, report.results));
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    print_fit_summary(report, out);
    return 0;
}

int cmd_simulate(const SimulateCommand& cmd, std::ostream& out,
                 std::ostream& err) {
    SimConfig config;
    try {
        if (!cmd.config_path.empty())
            config = parse_sim_config(read_file(cmd.config_path));
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    if (cmd.env_seed) config.base_seed = *cmd.env_seed;
    if (cmd.seed) config.base_seed = *cmd.seed;
    if (cmd.delta_values) config.delta_values = *cmd.delta_values;
    if (cmd.n_values) config.n_values = *cmd.n_values;
    if (cmd.replications) config.replications = *cmd.replications;
    if (cmd.beta_true) config.beta_true = *cmd.beta_true;
    if (cmd.gamma_true) config.gamma_true = *cmd.gamma_true;
    if (cmd.methods) {
        config.methods.clear();
        for (const std::string& name : *cmd.methods) {
            try {
                config.methods.push_back(method_from_string(name));
            } catch (const std::invalid_argument&) {
                err << "error: methods: unknown method '" << name << "'\n";
                return 1;
            }
        }
    }

    if (config.replications < 1) {
        err << "error: replications: must be >= 1 (got "
            << config.replications << ")\n";
        return 1;
    }
    if (config.delta_values.empty()) {
        err << "error: delta_values: must be nonempty\n";
        return 1;
    }
    for (double d : config.delta_values)
        if (!(d > 0.0)) {
            err << "error: delta_values: entries must be positive (got " << d
                << ")\n";
            return 1;
        }
    if (config.n_values.empty()) {
        err << "error: n_values: must be nonempty\n";
        return 1;
    }
    for (int n : config.n_values)
        if (n <= 2) {
            err << "error: n_values: entries must be > 2 (got " << n << ")\n";
            return 1;
        }
    if (config.methods.empty()) {
        err << "error: methods: must be nonempty\n";
        return 1;
    }
    if (!(config.quadrature.relative_tolerance > 0.0) ||
        !(config.quadrature.absolute_tolerance > 0.0) ||
        config.quadrature.max_subdivisions < 1) {
        err << "error: quadrature: tolerances must be positive and "
               "max_subdivisions >= 1\n";
        return 1;
    }

    out << "== effective config ==\n"
        << serialize(config) << "== end config ==\n";
    out.flush();

    const SimReport report = run_simulation(config);
    const std::string csv = render_table_csv(report);
    if (!cmd.output.empty()) {
        try {
            write_file(cmd.output, csv);
        } catch (const IoError& e) {
            err << "error: " << e.what() << "\n";
            return 1;
        }
    }
    out << render_table_text(report);
    return 0;
}

} // namespace rwfit

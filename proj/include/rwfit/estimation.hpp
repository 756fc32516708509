#pragma once

#include "rwfit/distribution.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace rwfit {

enum class Method { MLE, MME, LSPFE };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::MLE: return "mle";
        case Method::MME: return "mme";
        case Method::LSPFE: return "lspfe";
    }
    return "unknown";
}

inline Method method_from_string(const std::string& name) {
    if (name == "mle" || name == "MLE") return Method::MLE;
    if (name == "mme" || name == "MME") return Method::MME;
    if (name == "lspfe" || name == "LSPFE") return Method::LSPFE;
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected mle, mme, or lspfe)");
}

class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EstimationResult {
    Method method = Method::MLE;
    RwParams params{1.0, 1.0, 0.0};
    std::optional<double> log_likelihood;  // absent for MME
    bool converged = false;
    bool boundary_hit = false;
    int iterations = 0;
    std::string notes;
};

} // namespace rwfit

#pragma once

#include <stdexcept>
#include <string>

namespace sif {

/// Broad failure classes; each maps to a CLI exit code.
enum class ErrorClass { config = 2, numerical = 3, condition = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), cls_(cls), code_(std::move(code)) {}

    ErrorClass error_class() const noexcept { return cls_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorClass cls_;
    std::string code_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorClass::config, "ConfigError", what) {}
};

struct NumericalError : Error {
    NumericalError(std::string code, const std::string& what)
        : Error(ErrorClass::numerical, std::move(code), what) {}
};

struct ConditionError : Error {
    ConditionError(std::string code, const std::string& what)
        : Error(ErrorClass::condition, std::move(code), what) {}
};

inline NumericalError no_crossing(const std::string& w) { return {"NoCrossing", w}; }
inline NumericalError mass_deficit(const std::string& w) { return {"MassDeficit", w}; }
inline NumericalError no_convergence(const std::string& w) { return {"NoConvergence", w}; }
inline NumericalError degenerate_interval(const std::string& w) { return {"DegenerateInterval", w}; }
inline NumericalError horizon_exceeded(const std::string& w) { return {"HorizonExceeded", w}; }
inline NumericalError at_discontinuity(const std::string& w) { return {"AtDiscontinuity", w}; }
inline ConditionError non_transversal(const std::string& w) { return {"NonTransversal", w}; }
inline ConditionError prediction_invalid(const std::string& w) { return {"PredictionInvalid", w}; }

} // namespace sif

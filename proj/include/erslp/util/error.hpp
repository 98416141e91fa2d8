#pragma once

#include <stdexcept>
#include <string>

namespace erslp {

/// Failure categories; each maps onto one CLI exit code.
enum class ErrorKind {
    Input,      // malformed arguments to a library call
    Config,     // invalid or inconsistent configuration
    Data,       // parse, transform and missing-value failures
    Numerical,  // infeasible horizons, fully degenerate ensembles
    Inference,  // bootstrap failures
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InputError : Error {
    explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};
struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};
struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};
struct InferenceError : Error {
    explicit InferenceError(const std::string& what) : Error(ErrorKind::Inference, what) {}
};

[[nodiscard]] const char* to_string(ErrorKind kind) noexcept;

/// Rethrows `e` as the same kind with "context: " prepended, unless the message
/// already starts with the context.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context);

}  // namespace erslp

#include "erslp/util/error.hpp"

namespace erslp {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Input: return "input";
        case ErrorKind::Config: return "config";
        case ErrorKind::Data: return "data";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::Inference: return "inference";
    }
    return "unknown";
}

void rethrow_with_context(const Error& e, const std::string& context) {
    const std::string msg = e.what();
    const std::string full = msg.rfind(context, 0) == 0 ? msg : context + ": " + msg;
    switch (e.kind()) {
        case ErrorKind::Input: throw InputError(full);
        case ErrorKind::Config: throw ConfigError(full);
        case ErrorKind::Data: throw DataError(full);
        case ErrorKind::Numerical: throw NumericalError(full);
        case ErrorKind::Inference: throw InferenceError(full);
    }
    throw Error(e.kind(), full);
}

}  // namespace erslp

#include "musob/errors.hpp"

#include "musob/format.hpp"

namespace musob {

ValidationError::ValidationError(std::string path, const std::string& message)
    : Error(path + ": " + message), path_(std::move(path)) {}

EvaluationError::EvaluationError(double location, const std::string& message)
    : Error(message + " at x=" + format_double(location)), location_(location) {}

}  // namespace musob

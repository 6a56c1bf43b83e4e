#pragma once

#include <stdexcept>
#include <string>

namespace harmonize {

/// Error classes double as the CLI exit codes.
enum class ErrorClass : int {
    Validation = 1,
    Io = 2,
    Plan = 3,
    Internal = 4,
};

/// The single exception type thrown by the library. `code()` names the
/// failure kind (e.g. "MissingColumn", "CyclicDerivation"); `location()` is a
/// free-form pointer into the offending input ("details.csv row 4 recStart").
class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string code, const std::string& message, std::string location = {})
        : std::runtime_error(message), class_(cls), code_(std::move(code)), location_(std::move(location)) {}

    ErrorClass error_class() const noexcept { return class_; }
    const std::string& code() const noexcept { return code_; }
    const std::string& location() const noexcept { return location_; }
    int exit_code() const noexcept { return static_cast<int>(class_); }

private:
    ErrorClass class_;
    std::string code_;
    std::string location_;
};

inline Error validation_error(std::string code, const std::string& message, std::string location = {}) {
    return Error(ErrorClass::Validation, std::move(code), message, std::move(location));
}
inline Error io_error(std::string code, const std::string& message, std::string location = {}) {
    return Error(ErrorClass::Io, std::move(code), message, std::move(location));
}
inline Error plan_error(std::string code, const std::string& message, std::string location = {}) {
    return Error(ErrorClass::Plan, std::move(code), message, std::move(location));
}

}  // namespace harmonize

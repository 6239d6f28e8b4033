#pragma once

#include <stdexcept>
#include <string>

namespace naryq {

// Error categories; values line up with the CLI exit codes.
enum class ErrorCode {
    invalid_argument = 1,
    data = 2,
    numeric = 3,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_arg(const std::string& message) {
    throw Error(ErrorCode::invalid_argument, message);
}

[[noreturn]] inline void throw_data(const std::string& message) {
    throw Error(ErrorCode::data, message);
}

[[noreturn]] inline void throw_numeric(const std::string& message) {
    throw Error(ErrorCode::numeric, message);
}

} // namespace naryq

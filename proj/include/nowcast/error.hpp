#pragma once

#include <stdexcept>
#include <string>

namespace nowcast {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { Config, Data, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), kind_(kind), module_(std::move(module)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

inline Error config_error(std::string module, const std::string& message) {
    return Error(ErrorKind::Config, std::move(module), message);
}
inline Error data_error(std::string module, const std::string& message) {
    return Error(ErrorKind::Data, std::move(module), message);
}
inline Error numerical_error(std::string module, const std::string& message) {
    return Error(ErrorKind::Numerical, std::move(module), message);
}

inline int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Data: return 3;
    case ErrorKind::Numerical: return 4;
    }
    return 1;
}

// Warnings go to stderr unless silenced (tests and Monte Carlo loops silence them).
void warn(const std::string& module, const std::string& message);
void set_warnings_enabled(bool enabled);

} // namespace nowcast

#pragma once

#include <stdexcept>
#include <string>

namespace tomo {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// exit codes: config_error -> 2, numerical_error -> 3, io_error -> 4.
// std::invalid_argument / std::out_of_range are used for contract violations.

struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file contents (bad sidecar, inconsistent shapes, NaN payloads).
struct format_error : io_error {
    explicit format_error(const std::string& msg) : io_error(msg) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Foam rejection sampling ran out of attempts.
struct packing_error : numerical_error {
    explicit packing_error(const std::string& msg) : numerical_error(msg) {}
};

} // namespace tomo

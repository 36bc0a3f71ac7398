#pragma once

#include <stdexcept>
#include <string>

namespace coorb {

// Bad arguments or bad configuration (CLI exit code 2).
struct invalid_input : std::runtime_error {
    explicit invalid_input(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration-file problem, carries the offending line when known.
struct config_error : invalid_input {
    explicit config_error(const std::string& msg, int line = 0)
        : invalid_input(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_number(line) {}
    int line_number;
};

// Bodies touching or an evaluation at a collision direction (CLI exit code 3).
struct collision_error : std::runtime_error {
    collision_error(const std::string& msg, double t) : std::runtime_error(msg), time(t) {}
    double time;
};

// Root-finder non-convergence, unbound orbits, divergent quadratures, ... (CLI exit code 4).
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace coorb

#pragma once

#include <stdexcept>
#include <string>

namespace sphereineq {

/// Requested tolerance could not be met within the iteration caps.
struct nonconvergent_error : std::runtime_error {
    explicit nonconvergent_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Adaptive quadrature exhausted its subdivision budget.
struct quadrature_error : std::runtime_error {
    explicit quadrature_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Root bracketing failed (endpoint signs agree or multiple sign changes).
struct bracket_error : std::runtime_error {
    explicit bracket_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Tangent-frame evaluation requested too close to a pole.
struct pole_error : std::runtime_error {
    explicit pole_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dense symmetric eigensolver failed to converge.
struct eigensolver_error : std::runtime_error {
    explicit eigensolver_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sphereineq

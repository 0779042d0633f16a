#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace caproj {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when a linear-algebra routine cannot produce a valid result
/// (e.g. Lyapunov solve with a non-Hurwitz reference matrix).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a simulation step produces a non-finite state.
class IntegrationFault : public std::runtime_error {
public:
    IntegrationFault(double t, const std::string& what)
        : std::runtime_error(what + " at t=" + std::to_string(t)), time(t) {}

    double time;
};

/// Thrown on malformed configuration input (bad file, unknown key, type error).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline bool all_finite(double v) { return std::isfinite(v); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Clamps `value` so that the realized one-step rate (value - prev) / dt,
/// evaluated in floating point, lies within [rate_lo, rate_hi]. The plain
/// prev + rate*dt clamp can exceed the bound by a rounding ulp; the final
/// nudge loops make the measured rate respect the limit exactly.
inline double clamp_step_rate(double value, double prev, double rate_lo, double rate_hi,
                              double dt) {
    value = std::clamp(value, prev + rate_lo * dt, prev + rate_hi * dt);
    while ((value - prev) / dt > rate_hi) {
        value = std::nextafter(value, -std::numeric_limits<double>::infinity());
    }
    while ((value - prev) / dt < rate_lo) {
        value = std::nextafter(value, std::numeric_limits<double>::infinity());
    }
    return value;
}

}  // namespace caproj

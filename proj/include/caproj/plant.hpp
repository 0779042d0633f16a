#pragma once

#include <utility>
#include <vector>

#include "caproj/types.hpp"

namespace caproj {

/// Linear over-actuated plant x' = A x + B_v B Λ u with the input matrix
/// factored so that rank(B) = rank(B_v) = r < m.
struct PlantModel {
    Matrix a;    // n x n
    Matrix b_v;  // n x r
    Matrix b;    // r x m

    Index n() const { return a.rows(); }
    Index r() const { return b.rows(); }
    Index m() const { return b.cols(); }

    /// B_u = B_v B, the full (rank-deficient) input matrix.
    Matrix input_matrix() const { return b_v * b; }

    void validate() const;
};

/// Piecewise-constant actuator effectiveness: the diagonal of Λ per segment.
struct EffectivenessSchedule {
    struct Segment {
        double start = 0.0;  // s
        Vector lambda;       // m positive entries
    };
    std::vector<Segment> segments;

    void validate() const;
};

/// Per-actuator magnitude (rad) and rate (rad/s) limits.
struct ActuatorLimits {
    Vector u_min, u_max;
    Vector rate_min, rate_max;

    Index size() const { return u_min.size(); }
    void validate() const;
};

/// Memory for the discrete rate limiter: the currently applied deflections.
struct ActuatorBankState {
    Vector deflections;
};

Vector plant_derivatives(const Vector& x, const Vector& u_applied, const Vector& lambda,
                         const PlantModel& model);

/// The virtual control actually delivered to the plant: B Λ u.
Vector achieved_virtual(const Vector& u_applied, const Vector& lambda, const PlantModel& model);

/// Saturates a commanded deflection vector against magnitude limits and,
/// when `enable_rate` is set, against what the rate limits allow within one
/// step of length dt from the previously applied position.
std::pair<ActuatorBankState, Vector> apply_actuator_limits(const ActuatorBankState& bank,
                                                           const Vector& u_cmd, double dt,
                                                           const ActuatorLimits& limits,
                                                           bool enable_rate);

/// The linearized ADMIRE aircraft: five states (alpha, beta, p, q, r), four
/// surfaces (canard, right/left elevon, rudder), three virtual channels.
std::pair<PlantModel, ActuatorLimits> admire_model();

/// Diagonal of Λ active at time t (last segment whose start is <= t).
Vector lambda_at(double t, const EffectivenessSchedule& schedule);

/// Nominal effectiveness until `fault_time`, then a uniform loss of
/// `loss` (0.3 means 30% reduction) on all m actuators. A zero loss keeps
/// the switch point with unchanged effectiveness.
EffectivenessSchedule step_fault_schedule(Index m, double fault_time, double loss);

}  // namespace caproj

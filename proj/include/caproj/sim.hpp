#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "caproj/allocator.hpp"
#include "caproj/plant.hpp"
#include "caproj/reference.hpp"
#include "caproj/types.hpp"

namespace caproj {

enum class CaseId { I, II, III };

/// Diagonal PI gains of the substitute tracking controller acting on the
/// measured (p, q, r) rates. The integrator uses back-calculation against
/// the saturated total control input with time constant `anti_windup_tau`;
/// a non-positive value disables the correction.
struct ControllerGains {
    Vector ky;  // proportional, per channel
    Vector ki;  // integral, per channel
    double anti_windup_tau = 0.2;  // s
};

/// Magnitude (M) and rate (L) envelopes enforced on the total control input
/// before it reaches the allocator.
struct SoftSatLimits {
    Vector m;  // rad/s^2
    Vector l;  // rad/s^3
};

/// Complete description of one closed-loop run.
struct Scenario {
    CaseId case_id = CaseId::III;
    ProjectionKind kind = ProjectionKind::modified;
    bool enable_rate_limit = true;
    ReferenceSignal reference;
    EffectivenessSchedule schedule;
    double dt = 1e-3;
    double duration = 15.0;
    AllocatorConfig allocator;
    ControllerGains gains;
    SoftSatLimits soft_sat;
    PlantModel plant;
    ActuatorLimits limits;

    void validate() const;
};

/// One recorded instant of the closed loop.
struct TrajectorySample {
    double t = 0.0;
    Vector x;        // plant state, n
    Vector xi;       // virtual dynamics, r
    Vector xi_m;     // reference model, r
    Matrix theta_v;  // adaptive matrix, r x m
    Vector v;        // raw total control input, r
    Vector v_s;      // soft-saturated total control input, r
    Vector u_cmd;    // allocator command, m
    Vector u_applied;// post-limiter deflections, m
    double f_max = 0.0;
    double h_max = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Scenario scenario;  // the configuration that produced the run
};

/// PI law on the output channels: v = K_y (ref - y) + K_i * integral.
Vector controller(const Vector& y, const Vector& ref, const ControllerGains& gains,
                  const Vector& integral);

/// Magnitude shaping through M tanh(v/M) followed by a one-step rate clamp,
/// so |v_s| <= M and |v_s - prev_vs|/dt <= L elementwise.
Vector soft_saturate(const Vector& v, const Vector& prev_vs, double dt, const Vector& m,
                     const Vector& l);

/// Classical fixed-step 4th-order Runge-Kutta update. Throws
/// IntegrationFault when a stage derivative is non-finite.
template <class State, class Fn>
State rk4_step(Fn&& deriv, const State& state, double t, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const auto stage = [&](State d) {
        if (!all_finite(d)) throw IntegrationFault(t, "non-finite derivative");
        return d;
    };
    const State k1 = stage(deriv(state, t));
    const State k2 = stage(deriv(State(state + 0.5 * dt * k1), t + 0.5 * dt));
    const State k3 = stage(deriv(State(state + 0.5 * dt * k2), t + 0.5 * dt));
    const State k4 = stage(deriv(State(state + dt * k3), t + dt));
    return State(state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Runs the closed loop: reference -> controller -> soft saturation ->
/// allocator -> actuator limits -> plant, with the achieved virtual control
/// fed back to the allocator. Controller output, soft saturation and the
/// actuator limiter update once per step; the plant and allocator ODEs
/// integrate continuously within the step.
Trajectory run_scenario(const Scenario& scenario);

/// RMS tracking error of one reference segment, measured over its final half.
struct SegmentError {
    int channel = 0;         // 0=p, 1=q, 2=r
    double start = 0.0;      // s
    double duration = 0.0;   // s
    double amplitude = 0.0;  // rad/s
    double rms = 0.0;        // rad/s
};

struct Metrics {
    std::vector<SegmentError> tracking;
    Vector max_applied_rate;    // per actuator, max |Δu_applied|/dt
    Vector max_command_rate;    // per actuator, max |Δu_cmd|/dt
    Vector max_applied_abs;     // per actuator, max |u_applied|
    Vector oscillation_index;   // per actuator, total variation after the fault
    double fault_time = 0.0;    // start of the oscillation window
    double f_max = 0.0;
    double h_max = 0.0;
    double e2_residual_max = 0.0;   // max over the final second of ||e||^2 - bound
    bool e2_holds_final_second = false;
};

Metrics metrics(const Trajectory& trajectory, const ReferenceSignal& reference);

/// Fixed-schema CSV export of a trajectory (full double precision).
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);

/// Human-readable key/value report of a metric record.
std::string format_metrics(const Metrics& m);

}  // namespace caproj

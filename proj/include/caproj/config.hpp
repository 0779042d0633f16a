#pragma once

#include <optional>
#include <string>

#include "caproj/sim.hpp"

namespace caproj {

/// User-facing knobs of a scenario. The ADMIRE constants, the fault
/// schedule, the doublet reference and the tuned gains ship as defaults;
/// a config file overrides fields selectively.
struct ScenarioParams {
    double dt = 1e-3;
    double duration = 15.0;

    double fault_time = 6.0;
    double fault_loss = 0.3;   // 0.3 = 30% effectiveness reduction
    std::optional<Vector> fault_lambda;  // per-actuator post-fault diagonal

    ReferenceSignal reference;

    Vector ky, ki;     // controller gains per channel
    double anti_windup_tau = 0.12;  // integrator back-calculation time constant, s
    Vector sat_m, sat_l;  // soft saturation envelopes

    double gamma = 120.0;      // adaptation gain (Gamma = gamma * I)
    double a_m_diag = -5.0;    // reference model A_m = a_m_diag * I
    double q_diag = 1.0;       // Lyapunov weight Q = q_diag * I
    double zeta_frac = 0.05;   // theta tolerance as a fraction of the range
    double eps_frac = 0.05;    // regressor tolerance as a fraction of the range
    double safety = 0.95;      // saturation budget safety factor
    double lambda_design = 0.7;  // lowest effectiveness the bounds must cover
    double theta_margin = 1.15;  // headroom over the ideal parameter
    bool uniform_sizing = false; // spread magnitude budget uniformly instead
                                 // of proportionally to the ideal parameter

    PlantModel plant;
    ActuatorLimits limits;
};

/// ADMIRE plant, doublet references, 30% fault at t=6 s, tuned gains.
ScenarioParams default_params();

/// Assembles a runnable scenario: sizes the projection bounds, solves for
/// the initial adaptive matrix and applies the per-case operator/limiter
/// combination.
Scenario build_scenario(const ScenarioParams& params, CaseId case_id);

/// Parses overrides from JSON text onto the defaults. Unknown keys raise
/// ConfigError.
ScenarioParams params_from_json_text(const std::string& text);

/// Reads and parses a config file; empty path returns the defaults.
ScenarioParams load_params(const std::string& path);

CaseId parse_case(const std::string& text);

}  // namespace caproj

#include "caproj/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "caproj/lyapunov.hpp"

namespace caproj {

namespace {

/// Integration bundle for one closed-loop step.
struct SimState {
    Vector x, xi, xi_m, ctrl_integral;
    Matrix theta_v;
};

SimState operator+(const SimState& a, const SimState& b) {
    return {a.x + b.x, a.xi + b.xi, a.xi_m + b.xi_m, a.ctrl_integral + b.ctrl_integral,
            a.theta_v + b.theta_v};
}

SimState operator*(double c, const SimState& a) {
    return {c * a.x, c * a.xi, c * a.xi_m, c * a.ctrl_integral, c * a.theta_v};
}

bool all_finite(const SimState& s) {
    return s.x.allFinite() && s.xi.allFinite() && s.xi_m.allFinite() &&
           s.ctrl_integral.allFinite() && s.theta_v.allFinite();
}

Vector measured_rates(const Vector& x) { return x.segment(2, 3); }

}  // namespace

void Scenario::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
    const bool conventional = kind == ProjectionKind::conventional;
    switch (case_id) {
        case CaseId::I:
            if (!conventional || enable_rate_limit) {
                throw std::invalid_argument("case I requires the conventional operator and no rate limit");
            }
            break;
        case CaseId::II:
            if (!conventional || !enable_rate_limit) {
                throw std::invalid_argument("case II requires the conventional operator with rate limit");
            }
            break;
        case CaseId::III:
            if (conventional || !enable_rate_limit) {
                throw std::invalid_argument("case III requires the modified operator with rate limit");
            }
            break;
    }
    if (kind != allocator.kind) {
        throw std::invalid_argument("scenario and allocator projection kinds disagree");
    }
    if (plant.n() < 5 || plant.r() != 3) {
        throw std::invalid_argument("the closed loop measures (p, q, r) at states 3..5 and "
                                    "needs three virtual channels");
    }
    plant.validate();
    limits.validate();
    allocator.validate();
    reference.validate();
    schedule.validate();
    if (schedule.segments.front().lambda.size() != plant.m()) {
        throw std::invalid_argument("effectiveness schedule actuator count mismatch");
    }
    if (limits.size() != plant.m()) throw std::invalid_argument("actuator limit count mismatch");
    if (allocator.r() != plant.r() || allocator.m() != plant.m()) {
        throw std::invalid_argument("allocator dimensions do not match the plant");
    }
    if (gains.ky.size() != plant.r() || gains.ki.size() != plant.r()) {
        throw std::invalid_argument("controller gain dimensions must match the virtual channels");
    }
    if ((gains.ki.array() < 0.0).any() || (gains.ky.array() < 0.0).any()) {
        throw std::invalid_argument("controller gains must be nonnegative");
    }
    if (soft_sat.m.size() != plant.r() || soft_sat.l.size() != plant.r() ||
        (soft_sat.m.array() <= 0.0).any() || (soft_sat.l.array() <= 0.0).any()) {
        throw std::invalid_argument("soft saturation envelopes must be positive per channel");
    }
}

Vector controller(const Vector& y, const Vector& ref, const ControllerGains& gains,
                  const Vector& integral) {
    if (y.size() != ref.size() || y.size() != gains.ky.size() || y.size() != gains.ki.size() ||
        y.size() != integral.size()) {
        throw std::invalid_argument("controller input dimensions disagree");
    }
    return gains.ky.cwiseProduct(ref - y) + gains.ki.cwiseProduct(integral);
}

Vector soft_saturate(const Vector& v, const Vector& prev_vs, double dt, const Vector& m,
                     const Vector& l) {
    if (v.size() != prev_vs.size() || v.size() != m.size() || v.size() != l.size()) {
        throw std::invalid_argument("soft saturation dimensions disagree");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        const double shaped = m(i) * std::tanh(v(i) / m(i));
        out(i) = clamp_step_rate(shaped, prev_vs(i), -l(i), l(i), dt);
    }
    return out;
}

Trajectory run_scenario(const Scenario& scenario) {
    scenario.validate();

    const Matrix p = solve_lyapunov(scenario.allocator.a_m, scenario.allocator.q);
    const Index n = scenario.plant.n();
    const Index r = scenario.plant.r();

    const auto steps = static_cast<Index>(std::llround(scenario.duration / scenario.dt));
    Trajectory trajectory;
    trajectory.scenario = scenario;
    trajectory.samples.reserve(static_cast<std::size_t>(steps) + 1);

    SimState state{Vector::Zero(n), Vector::Zero(r), Vector::Zero(r), Vector::Zero(r),
                   scenario.allocator.theta_init};
    ActuatorBankState bank{Vector::Zero(scenario.plant.m())};
    Vector prev_vs = Vector::Zero(r);

    for (Index k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * scenario.dt;
        if (!all_finite(state)) throw IntegrationFault(t, "non-finite state");

        // Discrete part of the loop, held for the coming step.
        const Vector ref = scenario.reference.at(t);
        const Vector y = measured_rates(state.x);
        const Vector v = controller(y, ref, scenario.gains, state.ctrl_integral);
        const Vector v_s = soft_saturate(v, prev_vs, scenario.dt, scenario.soft_sat.m,
                                         scenario.soft_sat.l);
        prev_vs = v_s;
        const Vector u_cmd = allocation_command(state.theta_v, v_s);
        auto [next_bank, u_applied] =
            apply_actuator_limits(bank, u_cmd, scenario.dt, scenario.limits,
                                  scenario.enable_rate_limit);
        bank = next_bank;
        const Vector lambda = lambda_at(t, scenario.schedule);
        const Vector achieved = achieved_virtual(u_applied, lambda, scenario.plant);

        TrajectorySample sample;
        sample.t = t;
        sample.x = state.x;
        sample.xi = state.xi;
        sample.xi_m = state.xi_m;
        sample.theta_v = state.theta_v;
        sample.v = v;
        sample.v_s = v_s;
        sample.u_cmd = u_cmd;
        sample.u_applied = u_applied;

        const Matrix y_now = regressor(v_s, state.xi - state.xi_m, p, scenario.plant.b);
        double f_max = -std::numeric_limits<double>::infinity();
        double h_max = -std::numeric_limits<double>::infinity();
        for (Index i = 0; i < r; ++i) {
            for (Index j = 0; j < scenario.plant.m(); ++j) {
                f_max = std::max(f_max, f_convex(state.theta_v(i, j),
                                                 scenario.allocator.bounds.theta_at(i, j)));
                h_max = std::max(h_max, h_convex(y_now(i, j),
                                                 scenario.allocator.bounds.regressor_at(i, j)));
            }
        }
        sample.f_max = f_max;
        sample.h_max = h_max;
        trajectory.samples.push_back(std::move(sample));

        if (k == steps) break;

        const auto deriv = [&](const SimState& s, double tau) -> SimState {
            SimState dot;
            dot.x = plant_derivatives(s.x, u_applied, lambda, scenario.plant);
            AllocatorState alloc{s.xi, s.xi_m, s.theta_v};
            const AllocatorState alloc_dot = allocator_derivatives(
                alloc, v_s, achieved, p, scenario.plant.b, scenario.allocator);
            dot.xi = alloc_dot.xi;
            dot.xi_m = alloc_dot.xi_m;
            dot.theta_v = alloc_dot.theta_v;
            const Vector error = scenario.reference.at(tau) - measured_rates(s.x);
            dot.ctrl_integral = error;
            if (scenario.gains.anti_windup_tau > 0.0) {
                // back-calculation: unwind the integrator by the saturation excess
                const Vector v_now = controller(measured_rates(s.x),
                                                scenario.reference.at(tau), scenario.gains,
                                                s.ctrl_integral);
                for (Index i = 0; i < r; ++i) {
                    if (scenario.gains.ki(i) > 0.0) {
                        dot.ctrl_integral(i) +=
                            (v_s(i) - v_now(i)) /
                            (scenario.gains.ki(i) * scenario.gains.anti_windup_tau);
                    }
                }
            }
            return dot;
        };
        state = rk4_step(deriv, state, t, scenario.dt);
    }
    return trajectory;
}

Metrics metrics(const Trajectory& trajectory, const ReferenceSignal& reference) {
    if (trajectory.samples.empty()) throw std::invalid_argument("empty trajectory");
    const auto& samples = trajectory.samples;
    const auto& scenario = trajectory.scenario;
    const Index m = scenario.plant.m();
    const double dt = scenario.dt;

    Metrics out;
    out.fault_time = scenario.schedule.segments.back().start;

    for (int channel = 0; channel < 3; ++channel) {
        for (const auto& pulse : reference.channels[static_cast<std::size_t>(channel)]) {
            SegmentError seg;
            seg.channel = channel;
            seg.start = pulse.start;
            seg.duration = pulse.duration;
            seg.amplitude = pulse.amplitude;
            double sum_sq = 0.0;
            std::size_t count = 0;
            const double window_start = pulse.start + 0.5 * pulse.duration;
            for (const auto& s : samples) {
                if (s.t >= window_start && s.t < pulse.end()) {
                    const double err = s.x(2 + channel) - pulse.amplitude;
                    sum_sq += err * err;
                    ++count;
                }
            }
            seg.rms = count > 0 ? std::sqrt(sum_sq / static_cast<double>(count)) : 0.0;
            out.tracking.push_back(seg);
        }
    }

    out.max_applied_rate = Vector::Zero(m);
    out.max_command_rate = Vector::Zero(m);
    out.max_applied_abs = Vector::Zero(m);
    out.oscillation_index = Vector::Zero(m);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& s = samples[k];
        for (Index j = 0; j < m; ++j) {
            out.max_applied_abs(j) = std::max(out.max_applied_abs(j), std::abs(s.u_applied(j)));
        }
        if (k == 0) continue;
        const auto& prev = samples[k - 1];
        for (Index j = 0; j < m; ++j) {
            const double applied_step = std::abs(s.u_applied(j) - prev.u_applied(j)) / dt;
            const double cmd_step = std::abs(s.u_cmd(j) - prev.u_cmd(j)) / dt;
            out.max_applied_rate(j) = std::max(out.max_applied_rate(j), applied_step);
            out.max_command_rate(j) = std::max(out.max_command_rate(j), cmd_step);
            if (s.t > out.fault_time) {
                out.oscillation_index(j) += std::abs(s.u_applied(j) - prev.u_applied(j));
            }
        }
    }

    out.f_max = -std::numeric_limits<double>::infinity();
    out.h_max = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        out.f_max = std::max(out.f_max, s.f_max);
        out.h_max = std::max(out.h_max, s.h_max);
    }

    const Eigen::SelfAdjointEigenSolver<Matrix> q_eigs(scenario.allocator.q);
    const double lambda_min_q = q_eigs.eigenvalues().minCoeff();
    const double y_max_norm = regressor_abs_max(scenario.allocator.bounds).norm();
    const double final_start = samples.back().t - 1.0;
    out.e2_residual_max = -std::numeric_limits<double>::infinity();
    out.e2_holds_final_second = true;
    for (const auto& s : samples) {
        if (s.t < final_start) continue;
        const Vector lambda = lambda_at(s.t, scenario.schedule);
        const Matrix theta_star = ideal_theta(scenario.plant.b, lambda);
        const double tilde_sq = (s.theta_v - theta_star).squaredNorm();
        const double bound = 2.0 * tilde_sq * y_max_norm / lambda_min_q;
        const double residual = (s.xi - s.xi_m).squaredNorm() - bound;
        out.e2_residual_max = std::max(out.e2_residual_max, residual);
        if (residual > 0.0) out.e2_holds_final_second = false;
    }
    return out;
}

namespace {

void append_number(std::string& line, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    line += buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
    const Index r = trajectory.scenario.plant.r();
    const Index m = trajectory.scenario.plant.m();
    out << "t";
    for (Index i = 1; i <= trajectory.scenario.plant.n(); ++i) out << ",x" << i;
    for (Index i = 1; i <= r; ++i) out << ",xi" << i;
    for (Index i = 1; i <= r; ++i) out << ",xim" << i;
    for (Index i = 1; i <= r; ++i) {
        for (Index j = 1; j <= m; ++j) out << ",th_" << i << "_" << j;
    }
    for (Index i = 1; i <= r; ++i) out << ",v" << i;
    for (Index i = 1; i <= r; ++i) out << ",vs" << i;
    for (Index j = 1; j <= m; ++j) out << ",ucmd" << j;
    for (Index j = 1; j <= m; ++j) out << ",uapp" << j;
    out << ",f_max,h_max\n";

    std::string line;
    for (const auto& s : trajectory.samples) {
        line.clear();
        append_number(line, s.t);
        const auto push = [&line](double v) {
            line += ',';
            append_number(line, v);
        };
        for (Index i = 0; i < s.x.size(); ++i) push(s.x(i));
        for (Index i = 0; i < r; ++i) push(s.xi(i));
        for (Index i = 0; i < r; ++i) push(s.xi_m(i));
        for (Index i = 0; i < r; ++i) {
            for (Index j = 0; j < m; ++j) push(s.theta_v(i, j));
        }
        for (Index i = 0; i < r; ++i) push(s.v(i));
        for (Index i = 0; i < r; ++i) push(s.v_s(i));
        for (Index j = 0; j < m; ++j) push(s.u_cmd(j));
        for (Index j = 0; j < m; ++j) push(s.u_applied(j));
        push(s.f_max);
        push(s.h_max);
        line += '\n';
        out << line;
    }
}

std::string format_metrics(const Metrics& m) {
    std::ostringstream out;
    out.precision(12);
    for (const auto& seg : m.tracking) {
        static const char* names[] = {"p", "q", "r"};
        out << "tracking_rms[" << names[seg.channel] << " @" << seg.start << "s+"
            << seg.duration << "s amp=" << seg.amplitude << "]: " << seg.rms << "\n";
    }
    const auto vec_line = [&out](const char* name, const Vector& v) {
        out << name << ":";
        for (Index j = 0; j < v.size(); ++j) out << " " << v(j);
        out << "\n";
    };
    vec_line("max_applied_rate", m.max_applied_rate);
    vec_line("max_command_rate", m.max_command_rate);
    vec_line("max_applied_abs", m.max_applied_abs);
    vec_line("oscillation_index", m.oscillation_index);
    out << "oscillation_window_start: " << m.fault_time << "\n";
    out << "f_max: " << m.f_max << "\n";
    out << "h_max: " << m.h_max << "\n";
    out << "e2_residual_max_final_second: " << m.e2_residual_max << "\n";
    out << "e2_holds_final_second: " << (m.e2_holds_final_second ? "yes" : "no") << "\n";
    return out.str();
}

}  // namespace caproj

#include "caproj/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

namespace caproj {

namespace {

void require_length(const Vector& v, Index n, const char* what) {
    if (v.size() != n) {
        throw std::invalid_argument(std::string(what) + " has wrong length");
    }
}

Index rank_of(const Matrix& m) {
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(1e-9);
    return qr.rank();
}

}  // namespace

void PlantModel::validate() const {
    if (a.rows() != a.cols()) throw std::invalid_argument("state matrix must be square");
    if (b_v.rows() != n() || b_v.cols() != r()) {
        throw std::invalid_argument("B_v must be n x r");
    }
    if (rank_of(b) != r() || rank_of(b_v) != r()) {
        throw std::invalid_argument("B and B_v must both have full row/column rank r");
    }
}

void EffectivenessSchedule::validate() const {
    if (segments.empty()) throw std::invalid_argument("effectiveness schedule is empty");
    if (segments.front().start != 0.0) {
        throw std::invalid_argument("first effectiveness segment must start at t=0");
    }
    double prev = -1.0;
    for (const auto& seg : segments) {
        if (seg.start <= prev) {
            throw std::invalid_argument("effectiveness segment starts must be strictly increasing");
        }
        prev = seg.start;
        if (seg.lambda.size() == 0 || (seg.lambda.array() <= 0.0).any()) {
            throw std::invalid_argument("effectiveness entries must be strictly positive");
        }
        if (seg.lambda.size() != segments.front().lambda.size()) {
            throw std::invalid_argument("effectiveness segments must share one actuator count");
        }
    }
}

void ActuatorLimits::validate() const {
    const Index m = u_min.size();
    if (u_max.size() != m || rate_min.size() != m || rate_max.size() != m || m == 0) {
        throw std::invalid_argument("actuator limit vectors must share one length");
    }
    for (Index j = 0; j < m; ++j) {
        if (!(u_min(j) < 0.0 && 0.0 < u_max(j))) {
            throw std::invalid_argument("magnitude limits must straddle zero");
        }
        if (!(rate_min(j) < 0.0 && 0.0 < rate_max(j))) {
            throw std::invalid_argument("rate limits must straddle zero");
        }
    }
}

Vector plant_derivatives(const Vector& x, const Vector& u_applied, const Vector& lambda,
                         const PlantModel& model) {
    require_length(x, model.n(), "state");
    require_length(u_applied, model.m(), "actuator vector");
    require_length(lambda, model.m(), "effectiveness diagonal");
    return model.a * x + model.b_v * (model.b * (lambda.asDiagonal() * u_applied));
}

Vector achieved_virtual(const Vector& u_applied, const Vector& lambda, const PlantModel& model) {
    require_length(u_applied, model.m(), "actuator vector");
    require_length(lambda, model.m(), "effectiveness diagonal");
    return model.b * (lambda.asDiagonal() * u_applied);
}

std::pair<ActuatorBankState, Vector> apply_actuator_limits(const ActuatorBankState& bank,
                                                           const Vector& u_cmd, double dt,
                                                           const ActuatorLimits& limits,
                                                           bool enable_rate) {
    limits.validate();
    const Index m = limits.size();
    require_length(u_cmd, m, "actuator command");
    require_length(bank.deflections, m, "actuator bank state");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");

    Vector applied(m);
    for (Index j = 0; j < m; ++j) {
        double u = std::clamp(u_cmd(j), limits.u_min(j), limits.u_max(j));
        if (enable_rate) {
            u = clamp_step_rate(u, bank.deflections(j), limits.rate_min(j), limits.rate_max(j),
                                dt);
        }
        applied(j) = u;
    }
    return {ActuatorBankState{applied}, applied};
}

std::pair<PlantModel, ActuatorLimits> admire_model() {
    PlantModel model;
    model.a = Matrix{{-0.5432, 0.0137, 0.0, 0.9778, 0.0},
                     {0.0, -0.1179, 0.2215, 0.0, -0.9661},
                     {0.0, -10.5123, -0.9967, 0.0, 0.6176},
                     {2.6221, -0.0030, 0.0, -0.5057, 0.0},
                     {0.0, 0.7075, -0.0939, 0.0, -0.2127}};
    model.b = Matrix{{0.0, -4.2423, 4.2423, 1.4871},
                     {1.6532, -1.2735, -1.2735, 0.0024},
                     {0.0, -0.2805, 0.2805, -0.8823}};
    model.b_v = Matrix::Zero(5, 3);
    model.b_v.block(2, 0, 3, 3) = Matrix::Identity(3, 3);

    const double deg = std::numbers::pi / 180.0;
    ActuatorLimits limits;
    limits.u_min = Vector{{-55.0 * deg, -30.0 * deg, -30.0 * deg, -30.0 * deg}};
    limits.u_max = Vector{{25.0 * deg, 30.0 * deg, 30.0 * deg, 30.0 * deg}};
    limits.rate_min = Vector::Constant(4, -40.0 * deg);
    limits.rate_max = Vector::Constant(4, 40.0 * deg);
    return {model, limits};
}

Vector lambda_at(double t, const EffectivenessSchedule& schedule) {
    if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
    schedule.validate();
    const EffectivenessSchedule::Segment* active = &schedule.segments.front();
    for (const auto& seg : schedule.segments) {
        if (seg.start <= t) active = &seg;
    }
    return active->lambda;
}

EffectivenessSchedule step_fault_schedule(Index m, double fault_time, double loss) {
    EffectivenessSchedule schedule;
    schedule.segments.push_back({0.0, Vector::Ones(m)});
    schedule.segments.push_back({fault_time, Vector::Constant(m, 1.0 - loss)});
    return schedule;
}

}  // namespace caproj

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "caproj/plant.hpp"
#include "caproj/rng.hpp"

using namespace caproj;

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

TEST_CASE("admire constants") {
    const auto [model, limits] = admire_model();
    CHECK(model.n() == 5);
    CHECK(model.r() == 3);
    CHECK(model.m() == 4);

    Matrix a_expected(5, 5);
    a_expected << -0.5432, 0.0137, 0.0, 0.9778, 0.0,
                   0.0, -0.1179, 0.2215, 0.0, -0.9661,
                   0.0, -10.5123, -0.9967, 0.0, 0.6176,
                   2.6221, -0.0030, 0.0, -0.5057, 0.0,
                   0.0, 0.7075, -0.0939, 0.0, -0.2127;
    CHECK(model.a.cwiseEqual(a_expected).all());

    Matrix b_expected(3, 4);
    b_expected << 0.0, -4.2423, 4.2423, 1.4871,
                  1.6532, -1.2735, -1.2735, 0.0024,
                  0.0, -0.2805, 0.2805, -0.8823;
    CHECK(model.b.cwiseEqual(b_expected).all());

    CHECK(model.b(1, 0) == 1.6532);
    CHECK(model.a(2, 1) == -10.5123);

    Eigen::ColPivHouseholderQR<Matrix> qr(model.b);
    CHECK(qr.rank() == 3);

    // B_v stacks a 2x3 zero block over the identity
    CHECK(model.b_v.topRows(2).isZero(0.0));
    CHECK(model.b_v.bottomRows(3).cwiseEqual(Matrix::Identity(3, 3)).all());

    // the factored input matrix embeds B in the rate rows
    const Matrix b_u = model.input_matrix();
    CHECK(b_u.topRows(2).isZero(0.0));
    CHECK((b_u.bottomRows(3) - model.b).norm() == 0.0);

    CHECK(limits.u_min(0) == -55.0 * kDeg);
    CHECK(limits.u_max(0) == 25.0 * kDeg);
    for (Index j = 1; j < 4; ++j) {
        CHECK(limits.u_min(j) == -30.0 * kDeg);
        CHECK(limits.u_max(j) == 30.0 * kDeg);
    }
    for (Index j = 0; j < 4; ++j) {
        CHECK(limits.rate_min(j) == -40.0 * kDeg);
        CHECK(limits.rate_max(j) == 40.0 * kDeg);
    }

    CHECK_NOTHROW(model.validate());
    CHECK_NOTHROW(limits.validate());
}

TEST_CASE("plant derivatives") {
    const auto [model, limits] = admire_model();
    const Vector ones4 = Vector::Ones(4);

    CHECK(plant_derivatives(Vector::Zero(5), Vector::Zero(4), ones4, model).isZero(0.0));

    // unit effectiveness reduces to A x + B_u u
    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
        Vector x(5), u(4);
        for (Index i = 0; i < 5; ++i) x(i) = rng.uniform(-1.0, 1.0);
        for (Index j = 0; j < 4; ++j) u(j) = rng.uniform(-0.5, 0.5);
        const Vector dx = plant_derivatives(x, u, ones4, model);
        CHECK((dx - (model.a * x + model.input_matrix() * u)).norm() < 1e-14);
    }

    // x = e1, u = 0 picks out the first column of A
    Vector e1 = Vector::Zero(5);
    e1(0) = 1.0;
    const Vector dx = plant_derivatives(e1, Vector::Zero(4), ones4, model);
    CHECK(dx(0) == -0.5432);
    CHECK(dx(1) == 0.0);
    CHECK(dx(2) == 0.0);
    CHECK(dx(3) == 2.6221);
    CHECK(dx(4) == 0.0);

    CHECK_THROWS_AS(plant_derivatives(Vector::Zero(4), Vector::Zero(4), ones4, model),
                    std::invalid_argument);
}

TEST_CASE("achieved virtual control") {
    const auto [model, limits] = admire_model();
    CHECK(achieved_virtual(Vector::Zero(4), Vector::Ones(4), model).isZero(0.0));

    Vector u = Vector::Zero(4);
    u(0) = 1.0;
    const Vector v = achieved_virtual(u, Vector::Ones(4), model);
    CHECK(v(0) == 0.0);
    CHECK(v(1) == 1.6532);
    CHECK(v(2) == 0.0);

    // linear in the effectiveness
    Rng rng(9);
    for (int k = 0; k < 20; ++k) {
        Vector cmd(4);
        for (Index j = 0; j < 4; ++j) cmd(j) = rng.uniform(-0.5, 0.5);
        const double c = rng.uniform(0.1, 2.0);
        const Vector base = achieved_virtual(cmd, Vector::Ones(4), model);
        const Vector scaled = achieved_virtual(cmd, Vector::Constant(4, c), model);
        CHECK((scaled - c * base).norm() < 1e-14);
    }
}

TEST_CASE("actuator limiter") {
    const auto [model, limits] = admire_model();
    const double rate_step = 40.0 * kDeg * 0.001;

    ActuatorBankState bank{Vector::Zero(4)};

    SUBCASE("reachable commands pass through") {
        Vector cmd(4);
        cmd << 0.0001, -0.0002, 0.0003, 0.0;
        auto [next, applied] = apply_actuator_limits(bank, cmd, 0.001, limits, true);
        CHECK((applied - cmd).norm() == 0.0);
        CHECK((next.deflections - cmd).norm() == 0.0);
    }

    SUBCASE("rate clamp from rest") {
        Vector cmd = Vector::Zero(4);
        cmd(0) = 1.0;
        auto [next, applied] = apply_actuator_limits(bank, cmd, 0.001, limits, true);
        CHECK(applied(0) == doctest::Approx(rate_step).epsilon(1e-14));
    }

    SUBCASE("magnitude clamp at the canard lower stop") {
        ActuatorBankState near{Vector::Zero(4)};
        near.deflections(0) = -0.5;
        Vector cmd = Vector::Zero(4);
        cmd(0) = -2.0;
        auto [next, applied] = apply_actuator_limits(near, cmd, 1.0, limits, true);
        CHECK(applied(0) == -55.0 * kDeg);
    }

    SUBCASE("magnitude-only mode is idempotent") {
        Vector cmd(4);
        cmd << -2.0, 0.7, -0.7, 0.1;
        auto [bank1, applied1] = apply_actuator_limits(bank, cmd, 0.001, limits, false);
        auto [bank2, applied2] = apply_actuator_limits(bank1, cmd, 0.001, limits, false);
        CHECK((applied1 - applied2).norm() == 0.0);
    }

    SUBCASE("rate and magnitude soundness on random sequences") {
        Rng rng(21);
        const double dt = 0.002;
        ActuatorBankState state{Vector::Zero(4)};
        Vector prev = state.deflections;
        for (int k = 0; k < 2000; ++k) {
            Vector cmd(4);
            for (Index j = 0; j < 4; ++j) cmd(j) = rng.uniform(-2.0, 2.0);
            auto [next, applied] = apply_actuator_limits(state, cmd, dt, limits, true);
            for (Index j = 0; j < 4; ++j) {
                CHECK(applied(j) >= limits.u_min(j));
                CHECK(applied(j) <= limits.u_max(j));
                CHECK(std::abs(applied(j) - prev(j)) / dt <= limits.rate_max(j));
            }
            prev = applied;
            state = next;
        }
    }

    SUBCASE("bad dt") {
        CHECK_THROWS_AS(apply_actuator_limits(bank, Vector::Zero(4), 0.0, limits, true),
                        std::invalid_argument);
    }
}

TEST_CASE("effectiveness schedule") {
    const EffectivenessSchedule schedule = step_fault_schedule(4, 6.0, 0.3);
    CHECK_NOTHROW(schedule.validate());

    CHECK(lambda_at(0.0, schedule).cwiseEqual(Vector::Ones(4)).all());
    CHECK(lambda_at(5.999, schedule).cwiseEqual(Vector::Ones(4)).all());
    CHECK(lambda_at(6.0, schedule).cwiseEqual(Vector::Constant(4, 0.7)).all());
    CHECK(lambda_at(14.0, schedule).cwiseEqual(Vector::Constant(4, 0.7)).all());

    CHECK_THROWS_AS(lambda_at(-0.1, schedule), std::invalid_argument);

    EffectivenessSchedule bad;
    bad.segments.push_back({1.0, Vector::Ones(4)});
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    EffectivenessSchedule negative;
    negative.segments.push_back({0.0, Vector::Constant(4, -1.0)});
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);

    // a zero-loss schedule keeps the switch point but changes nothing
    const EffectivenessSchedule no_fault = step_fault_schedule(4, 6.0, 0.0);
    CHECK(no_fault.segments.size() == 2);
    CHECK(lambda_at(10.0, no_fault).cwiseEqual(Vector::Ones(4)).all());
}

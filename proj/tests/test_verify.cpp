#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "caproj/projection.hpp"
#include "caproj/rng.hpp"
#include "caproj/sim.hpp"
#include "caproj/verify.hpp"

using namespace caproj;

namespace {

ProjectionBounds generic_bounds() {
    return ProjectionBounds::uniform(3, 4, BoundSpec{-1.0, 1.0, 0.25},
                                     BoundSpec{-2.0, 2.0, 0.5});
}

SampleSpec quick_spec(std::int64_t count, std::uint64_t seed) {
    SampleSpec spec;
    spec.bounds = generic_bounds();
    spec.sample_count = count;
    spec.seed = seed;
    spec.region = SampleRegion::full_feasible;
    return spec;
}

}  // namespace

TEST_CASE("trace checks pass and are deterministic") {
    const SampleSpec spec = quick_spec(5000, 7);

    const CheckReport l2a = check_lemma2(spec);
    const CheckReport l2b = check_lemma2(spec);
    CHECK(l2a.pass);
    CHECK(l2a.worst <= 1e-12);
    CHECK(l2a.worst == l2b.worst);
    CHECK(l2a.witness == l2b.witness);

    const CheckReport l6 = check_lemma6(spec);
    CHECK(l6.pass);
    CHECK(l6.margin > 0.0);
}

TEST_CASE("trace expression vanishes in the degenerate cases") {
    const ProjectionBounds bounds = generic_bounds();
    Rng rng(29);
    Matrix theta(3, 4), y(3, 4);
    for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < 4; ++j) {
            theta(i, j) = rng.uniform(-0.7, 0.7);
            y(i, j) = rng.uniform(-3.0, 3.0);
        }
    }
    // matched reference: every factor (theta - theta*) is zero
    const Matrix conv = proj_conventional_matrix(theta, y, bounds);
    CHECK(((theta - theta).transpose() * (conv - y)).trace() == 0.0);

    // zero regressor: both operators return zero, so the residual vanishes
    const Matrix zero = Matrix::Zero(3, 4);
    CHECK(proj_conventional_matrix(theta, zero, bounds).isZero(0.0));
    CHECK(proj_modified_matrix(theta, zero, bounds).isZero(0.0));
}

TEST_CASE("zero regressor signal freezes the integrated parameter") {
    const ProjectionBounds bounds = generic_bounds();
    Matrix theta = Matrix::Constant(3, 4, 0.8);
    const Matrix frozen = theta;
    const Matrix zero = Matrix::Zero(3, 4);
    for (int k = 0; k < 100; ++k) {
        const auto deriv = [&](const Matrix& th, double) {
            return proj_modified_matrix(th, zero, bounds);
        };
        theta = rk4_step(deriv, theta, k * 1e-3, 1e-3);
    }
    CHECK((theta - frozen).norm() == 0.0);
}

TEST_CASE("trace checks over the boundary band region") {
    SampleSpec spec = quick_spec(5000, 19);
    spec.region = SampleRegion::boundary_band;
    CHECK(check_lemma2(spec).pass);
    CHECK(check_lemma6(spec).pass);
}

TEST_CASE("invariance check holds on short random signals") {
    const SampleSpec spec = quick_spec(5, 13);
    const CheckReport report = check_invariance(spec, 1e-3, 1.0);
    CHECK(report.pass);
    CHECK(report.worst <= 1.0 + 1e-3);

    CHECK_THROWS_AS(check_invariance(spec, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("continuity probe on the subset boundaries") {
    const CheckReport report = probe_continuity(generic_bounds(), 1e-8);
    CHECK(report.pass);
    CHECK(report.worst <= 1e-6);

    CHECK_THROWS_AS(probe_continuity(generic_bounds(), 0.0), std::invalid_argument);
}

TEST_CASE("continuity boundary values match the operator limits") {
    const BoundSpec th{-1.0, 1.0, 0.25};
    const BoundSpec yb{-2.0, 2.0, 0.5};
    const double d = 1e-8;

    // crossing h=0 with the parameter inactive approaches the regressor edge value
    const double edge = yb.inner_upper();
    const double from_s2 = proj_modified(0.0, edge + d, th, yb);
    const double from_s0 = proj_modified(0.0, edge - d, th, yb);
    CHECK(std::abs(from_s2 - edge) < 1e-6);
    CHECK(std::abs(from_s0 - edge) < 1e-6);

    // crossing h=0 inside the theta band approaches (edge)(1 - f)
    const double theta1 = 0.9;
    const double expected = edge * (1.0 - f_convex(theta1, th));
    CHECK(std::abs(proj_modified(theta1, edge + d, th, yb) - expected) < 1e-6);
    CHECK(std::abs(proj_modified(theta1, edge - d, th, yb) - expected) < 1e-6);
}

TEST_CASE("lipschitz estimate is finite and scale stable") {
    SampleSpec spec = quick_spec(20000, 17);
    const CheckReport coarse = estimate_lipschitz(spec.bounds, spec, 1e-3);
    CHECK(coarse.pass);
    CHECK(std::isfinite(coarse.worst));
    CHECK(coarse.worst > 0.0);

    const CheckReport combined = check_lipschitz(spec.bounds, spec);
    CHECK(combined.pass);
    CHECK(combined.margin > 0.0);
}

TEST_CASE("identity region has unit slope along the regressor axis") {
    const BoundSpec th{-1.0, 1.0, 0.25};
    const BoundSpec yb{-2.0, 2.0, 0.5};
    Rng rng(23);
    for (int k = 0; k < 1000; ++k) {
        const double theta = rng.uniform(th.inner_lower() + 0.01, th.inner_upper() - 0.01);
        const double y0 = rng.uniform(yb.inner_lower() + 0.01, yb.inner_upper() - 0.02);
        const double y1 = y0 + 0.005;
        const double ratio =
            std::abs(proj_modified(theta, y1, th, yb) - proj_modified(theta, y0, th, yb)) /
            0.005;
        CHECK(ratio == doctest::Approx(1.0).epsilon(1e-9));
        // no sensitivity along theta inside the identity region
        CHECK(proj_modified(theta + 0.001, y0, th, yb) ==
              doctest::Approx(proj_modified(theta, y0, th, yb)).epsilon(1e-12));
    }
}

TEST_CASE("report formatting") {
    std::vector<CheckReport> reports;
    reports.push_back({"lemma2", true, 1e-15, 1e-12, "sample 3"});
    reports.push_back({"continuity", false, 0.5, -0.5, "S0|S2"});
    const std::string text = format_reports(reports);
    CHECK(text.find("lemma2: pass") != std::string::npos);
    CHECK(text.find("continuity: FAIL") != std::string::npos);
    CHECK(text.find("witness=[S0|S2]") != std::string::npos);
}

TEST_CASE("named check dispatch") {
    CHECK_THROWS_AS(run_named_check(generic_bounds(), "bogus", 1), std::invalid_argument);
}

#include "caproj/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "caproj/projection.hpp"
#include "caproj/rng.hpp"
#include "caproj/sim.hpp"

namespace caproj {

namespace {

constexpr double kExactTol = 1e-12;
constexpr double kInvarianceTol = 1e-3;
constexpr double kContinuityTol = 1e-6;

double sample_in(Rng& rng, double lo, double hi) { return rng.uniform(lo, hi); }

double sample_theta(Rng& rng, const BoundSpec& spec, SampleRegion region) {
    switch (region) {
        case SampleRegion::inner:
            return sample_in(rng, spec.inner_lower(), spec.inner_upper());
        case SampleRegion::full_feasible:
            return sample_in(rng, spec.lower, spec.upper);
        case SampleRegion::boundary_band:
            return rng.sign() > 0.0 ? sample_in(rng, spec.inner_upper(), spec.upper)
                                    : sample_in(rng, spec.lower, spec.inner_lower());
    }
    throw std::invalid_argument("unknown sample region");
}

std::string cell_witness(std::int64_t sample, Index i, Index j, double theta, double theta_star,
                         double y) {
    std::ostringstream out;
    out.precision(10);
    out << "sample " << sample << " cell (" << i << "," << j << ") theta=" << theta
        << " theta*=" << theta_star << " Y=" << y;
    return out.str();
}

struct TraceSampler {
    const SampleSpec& spec;
    Rng rng;
    Matrix theta_star, theta, y;

    explicit TraceSampler(const SampleSpec& s) : spec(s), rng(s.seed) {
        theta_star.resize(s.bounds.rows, s.bounds.cols);
        theta.resize(s.bounds.rows, s.bounds.cols);
        y.resize(s.bounds.rows, s.bounds.cols);
    }

    void draw(bool y_within_bounds) {
        for (Index i = 0; i < spec.bounds.rows; ++i) {
            for (Index j = 0; j < spec.bounds.cols; ++j) {
                const BoundSpec& th_spec = spec.bounds.theta_at(i, j);
                const BoundSpec& y_spec = spec.bounds.regressor_at(i, j);
                theta_star(i, j) = sample_theta(rng, th_spec, SampleRegion::inner);
                theta(i, j) = sample_theta(rng, th_spec, spec.region);
                y(i, j) = y_within_bounds
                              ? sample_in(rng, y_spec.lower, y_spec.upper)
                              : sample_in(rng, 2.0 * y_spec.lower, 2.0 * y_spec.upper);
            }
        }
    }
};

}  // namespace

void SampleSpec::validate() const {
    bounds.validate();
    if (sample_count <= 0) throw std::invalid_argument("sample count must be positive");
}

CheckReport check_lemma2(const SampleSpec& spec) {
    spec.validate();
    CheckReport report;
    report.name = "lemma2";
    report.worst = -std::numeric_limits<double>::infinity();

    TraceSampler sampler(spec);
    for (std::int64_t k = 0; k < spec.sample_count; ++k) {
        sampler.draw(/*y_within_bounds=*/false);
        const Matrix projected =
            proj_conventional_matrix(sampler.theta, sampler.y, spec.bounds);
        const double trace =
            ((sampler.theta - sampler.theta_star).transpose() * (projected - sampler.y)).trace();
        if (trace > report.worst) {
            report.worst = trace;
            Index wi = 0, wj = 0;
            Matrix contrib =
                (sampler.theta - sampler.theta_star).cwiseProduct(projected - sampler.y);
            contrib.maxCoeff(&wi, &wj);
            report.witness = cell_witness(k, wi, wj, sampler.theta(wi, wj),
                                          sampler.theta_star(wi, wj), sampler.y(wi, wj));
        }
    }
    report.margin = kExactTol - report.worst;
    report.pass = report.worst <= kExactTol;
    return report;
}

CheckReport check_lemma6(const SampleSpec& spec) {
    spec.validate();
    CheckReport report;
    report.name = "lemma6";
    report.worst = -std::numeric_limits<double>::infinity();

    const double bound =
        theta_tilde_max(spec.bounds).norm() * regressor_abs_max(spec.bounds).norm();
    TraceSampler sampler(spec);
    for (std::int64_t k = 0; k < spec.sample_count; ++k) {
        sampler.draw(/*y_within_bounds=*/true);
        const Matrix projected = proj_modified_matrix(sampler.theta, sampler.y, spec.bounds);
        const double trace =
            ((sampler.theta - sampler.theta_star).transpose() * (projected - sampler.y)).trace();
        if (trace > report.worst) {
            report.worst = trace;
            Index wi = 0, wj = 0;
            Matrix contrib =
                (sampler.theta - sampler.theta_star).cwiseProduct(projected - sampler.y);
            contrib.maxCoeff(&wi, &wj);
            report.witness = cell_witness(k, wi, wj, sampler.theta(wi, wj),
                                          sampler.theta_star(wi, wj), sampler.y(wi, wj));
        }
    }
    report.margin = bound + kExactTol - report.worst;
    report.pass = report.worst <= bound + kExactTol;
    return report;
}

CheckReport check_invariance(const SampleSpec& spec, double dt, double duration) {
    spec.validate();
    if (!(dt > 0.0) || !(duration > 0.0)) {
        throw std::invalid_argument("invariance check needs positive dt and duration");
    }
    CheckReport report;
    report.name = "invariance";
    report.worst = -std::numeric_limits<double>::infinity();

    const Matrix y_bound = regressor_abs_max(spec.bounds);
    const double hold = 0.1;  // s per random regressor level
    const auto steps = static_cast<std::int64_t>(std::llround(duration / dt));
    const auto steps_per_hold = std::max<std::int64_t>(1, std::llround(hold / dt));

    Rng rng(spec.seed);
    double worst_rate_excess = -std::numeric_limits<double>::infinity();
    std::string rate_witness;

    for (std::int64_t signal = 0; signal < spec.sample_count; ++signal) {
        for (const ProjectionKind kind :
             {ProjectionKind::conventional, ProjectionKind::modified}) {
            Matrix theta(spec.bounds.rows, spec.bounds.cols);
            for (Index i = 0; i < spec.bounds.rows; ++i) {
                for (Index j = 0; j < spec.bounds.cols; ++j) {
                    theta(i, j) = sample_theta(rng, spec.bounds.theta_at(i, j), spec.region);
                }
            }
            Matrix y(spec.bounds.rows, spec.bounds.cols);
            for (std::int64_t k = 0; k < steps; ++k) {
                if (k % steps_per_hold == 0) {
                    for (Index i = 0; i < spec.bounds.rows; ++i) {
                        for (Index j = 0; j < spec.bounds.cols; ++j) {
                            const BoundSpec& y_spec = spec.bounds.regressor_at(i, j);
                            y(i, j) = sample_in(rng, y_spec.lower, y_spec.upper);
                        }
                    }
                }
                const Matrix rate = project(kind, theta, y, spec.bounds);
                if (kind == ProjectionKind::modified) {
                    const double excess = (rate.cwiseAbs() - y_bound).maxCoeff();
                    if (excess > worst_rate_excess) {
                        worst_rate_excess = excess;
                        std::ostringstream w;
                        w << "signal " << signal << " t=" << static_cast<double>(k) * dt;
                        rate_witness = w.str();
                    }
                }
                const auto deriv = [&](const Matrix& th, double) {
                    return project(kind, th, y, spec.bounds);
                };
                theta = rk4_step(deriv, theta, static_cast<double>(k) * dt, dt);

                double f_max = -std::numeric_limits<double>::infinity();
                Index wi = 0, wj = 0;
                for (Index i = 0; i < spec.bounds.rows; ++i) {
                    for (Index j = 0; j < spec.bounds.cols; ++j) {
                        const double f = f_convex(theta(i, j), spec.bounds.theta_at(i, j));
                        if (f > f_max) {
                            f_max = f;
                            wi = i;
                            wj = j;
                        }
                    }
                }
                if (f_max > report.worst) {
                    report.worst = f_max;
                    std::ostringstream w;
                    w << (kind == ProjectionKind::modified ? "modified" : "conventional")
                      << " signal " << signal << " t=" << static_cast<double>(k + 1) * dt
                      << " cell (" << wi << "," << wj << ")";
                    report.witness = w.str();
                }
            }
        }
    }
    const bool f_ok = report.worst <= 1.0 + kInvarianceTol;
    const bool rate_ok = worst_rate_excess <= 0.0;
    report.margin = 1.0 + kInvarianceTol - report.worst;
    report.pass = f_ok && rate_ok;
    if (!rate_ok) {
        report.witness += " | rate excess " + std::to_string(worst_rate_excess) + " at " +
                          rate_witness;
    }
    return report;
}

namespace {

struct BoundaryCase {
    const char* name;
    FeasibleSubset side_a;
    FeasibleSubset side_b;
    double theta_a, y_a;
    double theta_b, y_b;
};

void probe_cell(const BoundSpec& th, const BoundSpec& yb, double d, std::int64_t points,
                CheckReport& report) {
    const double theta_hi = th.inner_upper();
    const double theta_lo = th.inner_lower();
    const double y_hi = yb.inner_upper();
    const double y_lo = yb.inner_lower();

    std::vector<BoundaryCase> cases;
    cases.reserve(static_cast<std::size_t>(points) * 8);
    for (std::int64_t k = 1; k <= points; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(points + 1);

        // S0|S1 across f=0 with the regressor inactive.
        cases.push_back({"S0|S1", FeasibleSubset::S0, FeasibleSubset::S1, theta_hi - d,
                         frac * y_hi, theta_hi + d, frac * y_hi});
        cases.push_back({"S0|S1", FeasibleSubset::S0, FeasibleSubset::S1, theta_lo + d,
                         frac * y_lo, theta_lo - d, frac * y_lo});

        // S0|S2 across h=0 with the parameter strictly inside.
        const double theta_mid = theta_lo + frac * (theta_hi - theta_lo);
        cases.push_back({"S0|S2", FeasibleSubset::S0, FeasibleSubset::S2, theta_mid, y_hi - d,
                         theta_mid, y_hi + d});
        cases.push_back({"S0|S2", FeasibleSubset::S0, FeasibleSubset::S2, theta_mid, y_lo + d,
                         theta_mid, y_lo - d});

        // S1|S3 across h=0 inside the parameter barrier band.
        const double theta_band_hi = theta_hi + frac * (th.upper - theta_hi);
        const double theta_band_lo = theta_lo + frac * (th.lower - theta_lo);
        cases.push_back({"S1|S3", FeasibleSubset::S1, FeasibleSubset::S3, theta_band_hi,
                         y_hi - d, theta_band_hi, y_hi + d});
        cases.push_back({"S1|S3", FeasibleSubset::S1, FeasibleSubset::S3, theta_band_lo,
                         y_lo + d, theta_band_lo, y_lo - d});

        // S2|S3 across f=0 inside the regressor barrier band.
        const double y_band_hi = y_hi + frac * (yb.upper - y_hi);
        const double y_band_lo = y_lo + frac * (yb.lower - y_lo);
        cases.push_back({"S2|S3", FeasibleSubset::S2, FeasibleSubset::S3, theta_hi - d,
                         y_band_hi, theta_hi + d, y_band_hi});
        cases.push_back({"S2|S3", FeasibleSubset::S2, FeasibleSubset::S3, theta_lo + d,
                         y_band_lo, theta_lo - d, y_band_lo});
    }

    for (const auto& c : cases) {
        const FeasibleSubset got_a = classify_subset(c.theta_a, c.y_a, th, yb);
        const FeasibleSubset got_b = classify_subset(c.theta_b, c.y_b, th, yb);
        const double va = proj_modified(c.theta_a, c.y_a, th, yb);
        const double vb = proj_modified(c.theta_b, c.y_b, th, yb);
        const double diff = std::abs(va - vb);
        const bool sides_ok = got_a == c.side_a && got_b == c.side_b;
        if (diff > report.worst || !sides_ok) {
            report.worst = std::max(report.worst, diff);
            std::ostringstream w;
            w.precision(10);
            w << c.name << " theta=" << c.theta_a << " Y=" << c.y_a << " diff=" << diff;
            if (!sides_ok) {
                w << " (unexpected subset classification)";
                report.pass = false;
                report.witness = w.str();
                report.margin = -1.0;
                return;
            }
            report.witness = w.str();
        }
    }
}

}  // namespace

CheckReport probe_continuity(const ProjectionBounds& bounds, double approach_distance) {
    bounds.validate();
    if (!(approach_distance > 0.0)) {
        throw std::invalid_argument("approach distance must be positive");
    }
    CheckReport report;
    report.name = "continuity";
    report.pass = true;
    report.worst = 0.0;

    const std::int64_t points = 50;  // per boundary family and side; 100 per subset pair
    for (Index i = 0; i < bounds.rows && report.pass; ++i) {
        for (Index j = 0; j < bounds.cols && report.pass; ++j) {
            probe_cell(bounds.theta_at(i, j), bounds.regressor_at(i, j), approach_distance,
                       points, report);
        }
    }
    if (report.pass) {
        report.pass = report.worst <= kContinuityTol;
        report.margin = kContinuityTol - report.worst;
    }
    return report;
}

CheckReport estimate_lipschitz(const ProjectionBounds& bounds, const SampleSpec& spec,
                               double pair_scale) {
    bounds.validate();
    if (!(pair_scale > 0.0)) throw std::invalid_argument("pair scale must be positive");
    CheckReport report;
    report.name = "lipschitz";
    report.worst = 0.0;

    Rng rng(spec.seed);
    const auto cells = static_cast<std::uint64_t>(bounds.rows * bounds.cols);
    for (std::int64_t k = 0; k < spec.sample_count; ++k) {
        const auto cell = rng.index(cells);
        const Index i = static_cast<Index>(cell) / bounds.cols;
        const Index j = static_cast<Index>(cell) % bounds.cols;
        const BoundSpec& th = bounds.theta_at(i, j);
        const BoundSpec& yb = bounds.regressor_at(i, j);

        const double theta0 = rng.uniform(th.lower, th.upper);
        const double y0 = rng.uniform(yb.lower, yb.upper);
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double theta1 = std::clamp(theta0 + pair_scale * std::cos(angle), th.lower, th.upper);
        const double y1 = std::clamp(y0 + pair_scale * std::sin(angle), yb.lower, yb.upper);
        const double dist = std::hypot(theta1 - theta0, y1 - y0);
        if (dist < 1e-3 * pair_scale) continue;

        const double ratio =
            std::abs(proj_modified(theta1, y1, th, yb) - proj_modified(theta0, y0, th, yb)) /
            dist;
        if (ratio > report.worst) {
            report.worst = ratio;
            std::ostringstream w;
            w.precision(10);
            w << "cell (" << i << "," << j << ") theta=" << theta0 << " Y=" << y0
              << " scale=" << pair_scale;
            report.witness = w.str();
        }
    }
    report.pass = std::isfinite(report.worst);
    report.margin = report.pass ? 1.0 : -1.0;
    return report;
}

CheckReport check_lipschitz(const ProjectionBounds& bounds, const SampleSpec& spec) {
    SampleSpec coarse = spec;
    SampleSpec fine = spec;
    fine.seed = spec.seed + 1;
    const CheckReport at_coarse = estimate_lipschitz(bounds, coarse, 1e-3);
    const CheckReport at_fine = estimate_lipschitz(bounds, fine, 1e-6);

    CheckReport report;
    report.name = "lipschitz";
    const double hi = std::max(at_coarse.worst, at_fine.worst);
    const double lo = std::min(at_coarse.worst, at_fine.worst);
    const double factor = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    report.worst = hi;
    report.pass = at_coarse.pass && at_fine.pass && std::isfinite(factor) && factor <= 2.0;
    report.margin = 2.0 - factor;
    std::ostringstream w;
    w.precision(10);
    w << "ratio " << at_coarse.worst << " at 1e-3 vs " << at_fine.worst << " at 1e-6";
    report.witness = w.str();
    return report;
}

CheckReport run_named_check(const ProjectionBounds& bounds, const std::string& name,
                            std::uint64_t seed) {
    SampleSpec spec;
    spec.bounds = bounds;
    spec.region = SampleRegion::full_feasible;
    if (name == "lemma2") {
        spec.sample_count = 100000;
        spec.seed = seed;
        return check_lemma2(spec);
    }
    if (name == "lemma6") {
        spec.sample_count = 100000;
        spec.seed = seed + 1;
        return check_lemma6(spec);
    }
    if (name == "invariance") {
        spec.sample_count = 100;
        spec.seed = seed + 2;
        return check_invariance(spec, 1e-3, 10.0);
    }
    if (name == "continuity") {
        return probe_continuity(bounds, 1e-8);
    }
    if (name == "lipschitz") {
        spec.sample_count = 1000000;
        spec.seed = seed + 3;
        return check_lipschitz(bounds, spec);
    }
    throw std::invalid_argument("unknown check '" + name + "'");
}

std::vector<CheckReport> run_all_checks(const ProjectionBounds& bounds, std::uint64_t seed) {
    std::vector<CheckReport> reports;
    for (const char* name : {"lemma2", "lemma6", "invariance", "continuity", "lipschitz"}) {
        reports.push_back(run_named_check(bounds, name, seed));
    }
    return reports;
}

std::string format_reports(const std::vector<CheckReport>& reports) {
    std::ostringstream out;
    out.precision(10);
    for (const auto& r : reports) {
        out << r.name << ": " << (r.pass ? "pass" : "FAIL") << " worst=" << r.worst
            << " margin=" << r.margin << " witness=[" << r.witness << "]\n";
    }
    return out.str();
}

}  // namespace caproj

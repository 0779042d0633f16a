#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "caproj/bounds.hpp"
#include "caproj/types.hpp"

namespace caproj {

/// Where randomized samples of the adaptive parameter are drawn from.
enum class SampleRegion {
    inner,          // f <= 0, the tolerance-free core
    full_feasible,  // f <= 1, the whole bound set
    boundary_band,  // 0 < f <= 1, the barrier band only
};

/// Deterministic sampling plan for the randomized checks.
struct SampleSpec {
    ProjectionBounds bounds;
    std::int64_t sample_count = 100000;
    std::uint64_t seed = 1;
    SampleRegion region = SampleRegion::full_feasible;

    void validate() const;
};

/// Outcome of one randomized or grid check: pass/fail, the extremal value
/// the check compared against its threshold, the margin to that threshold
/// (positive margin = pass), and a printable worst-case witness.
struct CheckReport {
    std::string name;
    bool pass = false;
    double worst = 0.0;
    double margin = 0.0;
    std::string witness;
};

/// Trace inequality of the conventional operator: for parameters anywhere in
/// the bound set, references in the inner region and arbitrary regressors,
/// tr((theta-theta*)^T (-Y + Proj(theta, Y))) stays below 1e-12.
CheckReport check_lemma2(const SampleSpec& spec);

/// Trace inequality of the modified operator with regressors inside their
/// bound set: the trace stays below ||theta_tilde_max||_F ||Y_max||_F + 1e-12.
CheckReport check_lemma6(const SampleSpec& spec);

/// Integrates theta' = Proj(theta, Y(t)) for piecewise-constant bounded Y
/// signals and verifies the bound set is never left (both operators) and the
/// parameter rate never exceeds the regressor bound (modified operator).
CheckReport check_invariance(const SampleSpec& spec, double dt, double duration);

/// Evaluates the modified operator on both sides of every adjacent-subset
/// boundary at the given approach distance; passes when the two-sided values
/// agree within 1e-6.
CheckReport probe_continuity(const ProjectionBounds& bounds, double approach_distance);

/// Max |Proj_m(a1)-Proj_m(a0)| / ||a1-a0|| over random pairs at the given
/// separation scale, sampled inside the compact feasible box. Passes when
/// the ratio is finite.
CheckReport estimate_lipschitz(const ProjectionBounds& bounds, const SampleSpec& spec,
                               double pair_scale);

/// Runs estimate_lipschitz at scales 1e-3 and 1e-6 and passes when both are
/// finite and agree within a factor of two.
CheckReport check_lipschitz(const ProjectionBounds& bounds, const SampleSpec& spec);

/// All checks with their acceptance-sized sampling plans against the given
/// bounds. Names: lemma2, lemma6, invariance, continuity, lipschitz.
std::vector<CheckReport> run_all_checks(const ProjectionBounds& bounds, std::uint64_t seed);

/// One named check from the run_all_checks suite, with the same sampling plan.
CheckReport run_named_check(const ProjectionBounds& bounds, const std::string& name,
                            std::uint64_t seed);

/// One line per report: name, pass/fail, worst value, margin, witness.
std::string format_reports(const std::vector<CheckReport>& reports);

}  // namespace caproj

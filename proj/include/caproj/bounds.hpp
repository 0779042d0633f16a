#pragma once

#include <vector>

#include "caproj/types.hpp"

namespace caproj {

/// Scalar barrier bounds for one adaptive parameter or one regressor entry.
/// `tolerance` is the width of the barrier band between the inner region
/// [lower+tolerance, upper-tolerance] and the hard bounds.
struct BoundSpec {
    double lower = -1.0;
    double upper = 1.0;
    double tolerance = 0.1;

    double inner_lower() const { return lower + tolerance; }
    double inner_upper() const { return upper - tolerance; }

    /// Upper bound on |value| over [lower, upper].
    double abs_max() const { return std::max(-lower, upper); }

    /// Largest possible |value - reference| with value in [lower, upper]
    /// and reference in the inner region.
    double tilde_max() const { return (upper - lower) - tolerance; }

    /// Throws std::invalid_argument if the spec is malformed.
    void validate() const;
};

/// Per-element bound grids for the adaptive matrix and the regressor.
/// Both grids share the same r x m layout; storage is row-major.
struct ProjectionBounds {
    Index rows = 0;
    Index cols = 0;
    std::vector<BoundSpec> theta;
    std::vector<BoundSpec> regressor;

    ProjectionBounds() = default;
    ProjectionBounds(Index r, Index m)
        : rows(r), cols(m), theta(static_cast<std::size_t>(r * m)),
          regressor(static_cast<std::size_t>(r * m)) {}

    /// Same spec replicated over every cell.
    static ProjectionBounds uniform(Index r, Index m, const BoundSpec& theta_spec,
                                    const BoundSpec& regressor_spec);

    const BoundSpec& theta_at(Index i, Index j) const {
        return theta[static_cast<std::size_t>(i * cols + j)];
    }
    BoundSpec& theta_at(Index i, Index j) {
        return theta[static_cast<std::size_t>(i * cols + j)];
    }
    const BoundSpec& regressor_at(Index i, Index j) const {
        return regressor[static_cast<std::size_t>(i * cols + j)];
    }
    BoundSpec& regressor_at(Index i, Index j) {
        return regressor[static_cast<std::size_t>(i * cols + j)];
    }

    void validate() const;
};

/// Matrix of per-element worst-case parameter deviations, built from the
/// theta grid (max |theta - theta_ref| with theta_ref in the inner region).
Matrix theta_tilde_max(const ProjectionBounds& bounds);

/// Matrix of per-element upper bounds on |Y|, built from the regressor grid.
Matrix regressor_abs_max(const ProjectionBounds& bounds);

}  // namespace caproj

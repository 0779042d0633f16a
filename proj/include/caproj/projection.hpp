#pragma once

#include "caproj/bounds.hpp"
#include "caproj/types.hpp"

namespace caproj {

enum class ProjectionKind { conventional, modified };

/// Convex barrier on the adaptive parameter. Non-positive on the inner
/// region [lower+tol, upper-tol], exactly 1 at the hard bounds.
double f_convex(double theta, const BoundSpec& spec);

/// Closed-form derivative of f_convex with respect to theta.
double df_dtheta(double theta, const BoundSpec& spec);

/// Convex barrier on the regressor entry, same shape as f_convex.
double h_convex(double y, const BoundSpec& spec);

/// Element-wise projection that bounds parameter magnitude only:
/// y - y*f when the parameter is in the barrier band and y pushes outward,
/// y otherwise.
double proj_conventional(double theta, double y, const BoundSpec& spec);

/// Element-wise projection that bounds parameter magnitude and rate by
/// shaping y through both barriers. Branches are evaluated in order; the
/// multipliers use f̂ = min(1, f) and ĥ = min(1, h), so the output never
/// exceeds |y| and vanishes at either barrier.
double proj_modified(double theta, double y, const BoundSpec& theta_spec,
                     const BoundSpec& y_spec);

Matrix proj_conventional_matrix(const Matrix& theta, const Matrix& y,
                                const ProjectionBounds& bounds);

Matrix proj_modified_matrix(const Matrix& theta, const Matrix& y,
                            const ProjectionBounds& bounds);

/// Dispatch on the operator variant.
Matrix project(ProjectionKind kind, const Matrix& theta, const Matrix& y,
               const ProjectionBounds& bounds);

/// Subsets of the feasible (theta, y) plane on which proj_modified takes
/// its four branch expressions. S3 is the doubly-active region, S1 the
/// theta-barrier region, S2 the regressor-barrier region, S0 the identity
/// region.
enum class FeasibleSubset { S0, S1, S2, S3 };

FeasibleSubset classify_subset(double theta, double y, const BoundSpec& theta_spec,
                               const BoundSpec& y_spec);

}  // namespace caproj

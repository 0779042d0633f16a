#pragma once

#include "caproj/bounds.hpp"
#include "caproj/plant.hpp"
#include "caproj/projection.hpp"
#include "caproj/types.hpp"

namespace caproj {

/// Fixed design data for the adaptive allocator: a Hurwitz reference matrix,
/// the Lyapunov weight Q, the diagonal adaptation gain, the projection
/// bounds, the initial adaptive matrix and the operator variant.
struct AllocatorConfig {
    Matrix a_m;    // r x r, Hurwitz
    Matrix q;      // r x r, symmetric positive definite
    Matrix gamma;  // r x r, diagonal with positive entries
    ProjectionBounds bounds;
    Matrix theta_init;  // r x m
    ProjectionKind kind = ProjectionKind::modified;

    Index r() const { return a_m.rows(); }
    Index m() const { return theta_init.cols(); }

    void validate() const;
};

/// Integrated allocator state: virtual dynamics, reference model, adaptive
/// matrix.
struct AllocatorState {
    Vector xi;      // r
    Vector xi_m;    // r
    Matrix theta_v; // r x m

    Vector error() const { return xi - xi_m; }
};

/// Adaptation driving term Y = -v_s e^T P B, a rank-one r x m matrix.
Matrix regressor(const Vector& v_s, const Vector& e, const Matrix& p, const Matrix& b);

/// Allocation output u = theta_v^T v_s.
Vector allocation_command(const Matrix& theta_v, const Vector& v_s);

/// A right-inverse parameterization: theta_star with B Λ theta_star^T = I_r.
/// Requires B Λ to have full row rank.
Matrix ideal_theta(const Matrix& b, const Vector& lambda_diag);

/// Time derivatives of the allocator state. `achieved_virtual` is the B Λ u
/// measured from the plant for the currently applied u; the allocator never
/// reads Λ itself, only the known control matrix B.
AllocatorState allocator_derivatives(const AllocatorState& state, const Vector& v_s,
                                     const Vector& achieved_virtual, const Matrix& p,
                                     const Matrix& b, const AllocatorConfig& config);

/// Per-element magnitude bounds for theta_init clipped into the inner region.
Matrix clip_to_inner_region(const Matrix& theta, const ProjectionBounds& bounds);

/// Sizes projection bounds from actuator limits so that u = theta^T v_s and
/// its one-step rate stay within the saturation set whenever |v_i| <= M_i and
/// |v_i'| <= L_i. The magnitude budget 0.95*min(|u_min_j|, u_max_j) is spread
/// uniformly over the r rows of column j; the rate budget left after the
/// theta_max * L passthrough determines the regressor bounds.
ProjectionBounds bounds_from_actuator_limits(const ActuatorLimits& limits, const Vector& m_bound,
                                             const Vector& l_bound, const Matrix& gamma,
                                             double safety = 0.95, double zeta_frac = 0.05,
                                             double eps_frac = 0.05);

/// Same budgets as bounds_from_actuator_limits, but the per-element magnitude
/// bounds are taken from |theta_ref| (floored to keep a usable range), so a
/// known allocation solution fits inside the bounds when a uniform spread
/// cannot contain it. Throws when the reference allocation does not fit the
/// magnitude or rate budget.
ProjectionBounds bounds_from_reference_theta(const Matrix& theta_ref, const ActuatorLimits& limits,
                                             const Vector& m_bound, const Vector& l_bound,
                                             const Matrix& gamma, double safety = 0.95,
                                             double zeta_frac = 0.05, double eps_frac = 0.05);

}  // namespace caproj

#include "caproj/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/QR>

#include "caproj/lyapunov.hpp"

namespace caproj {

void AllocatorConfig::validate() const {
    const Index rr = a_m.rows();
    if (a_m.cols() != rr) throw std::invalid_argument("A_m must be square");
    if (!is_hurwitz(a_m)) throw std::invalid_argument("A_m must be Hurwitz");
    if (q.rows() != rr || q.cols() != rr || !q.isApprox(q.transpose(), 1e-12)) {
        throw std::invalid_argument("Q must be symmetric r x r");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> q_eigs(q);
    if (q_eigs.eigenvalues().minCoeff() <= 0.0) {
        throw std::invalid_argument("Q must be positive definite");
    }
    if (gamma.rows() != rr || gamma.cols() != rr ||
        !gamma.isApprox(Matrix(gamma.diagonal().asDiagonal()), 1e-12) ||
        (gamma.diagonal().array() <= 0.0).any()) {
        throw std::invalid_argument("Gamma must be diagonal with positive entries");
    }
    bounds.validate();
    if (bounds.rows != rr || theta_init.rows() != rr || theta_init.cols() != bounds.cols) {
        throw std::invalid_argument("bounds and theta_init must be r x m");
    }
    for (Index i = 0; i < rr; ++i) {
        for (Index j = 0; j < bounds.cols; ++j) {
            if (f_convex(theta_init(i, j), bounds.theta_at(i, j)) > 1.0) {
                std::ostringstream why;
                why << "theta_init(" << i << "," << j << ") lies outside its bound set";
                throw std::invalid_argument(why.str());
            }
        }
    }
}

Matrix regressor(const Vector& v_s, const Vector& e, const Matrix& p, const Matrix& b) {
    const Index r = b.rows();
    if (v_s.size() != r || e.size() != r || p.rows() != r || p.cols() != r) {
        throw std::invalid_argument("regressor inputs must share the virtual dimension r");
    }
    return -v_s * (e.transpose() * p * b);
}

Vector allocation_command(const Matrix& theta_v, const Vector& v_s) {
    if (theta_v.rows() != v_s.size()) {
        throw std::invalid_argument("theta_v rows must match the virtual control dimension");
    }
    return theta_v.transpose() * v_s;
}

Matrix ideal_theta(const Matrix& b, const Vector& lambda_diag) {
    if (lambda_diag.size() != b.cols()) {
        throw std::invalid_argument("effectiveness diagonal must have m entries");
    }
    const Matrix bl = b * lambda_diag.asDiagonal();
    const Matrix gram = bl * bl.transpose();
    const Eigen::FullPivLU<Matrix> lu(gram);
    if (!lu.isInvertible()) {
        throw std::invalid_argument("B*Lambda is rank deficient; no right inverse exists");
    }
    // theta_star^T = (B Λ)^T (B Λ (B Λ)^T)^{-1}, so B Λ theta_star^T = I.
    const Matrix theta_star_t = bl.transpose() * lu.inverse();
    return theta_star_t.transpose();
}

AllocatorState allocator_derivatives(const AllocatorState& state, const Vector& v_s,
                                     const Vector& achieved_virtual, const Matrix& p,
                                     const Matrix& b, const AllocatorConfig& config) {
    const Index r = config.r();
    if (state.xi.size() != r || state.xi_m.size() != r || v_s.size() != r ||
        achieved_virtual.size() != r || state.theta_v.rows() != r ||
        state.theta_v.cols() != config.bounds.cols || b.rows() != r ||
        b.cols() != config.bounds.cols) {
        throw std::invalid_argument("allocator state dimensions do not match the config");
    }
    AllocatorState dot;
    dot.xi = config.a_m * state.xi + achieved_virtual - v_s;
    dot.xi_m = config.a_m * state.xi_m;
    const Matrix y = regressor(v_s, state.error(), p, b);
    dot.theta_v = config.gamma * project(config.kind, state.theta_v, y, config.bounds);
    return dot;
}

Matrix clip_to_inner_region(const Matrix& theta, const ProjectionBounds& bounds) {
    if (theta.rows() != bounds.rows || theta.cols() != bounds.cols) {
        throw std::invalid_argument("theta shape does not match bounds");
    }
    Matrix out(theta.rows(), theta.cols());
    for (Index i = 0; i < theta.rows(); ++i) {
        for (Index j = 0; j < theta.cols(); ++j) {
            const BoundSpec& spec = bounds.theta_at(i, j);
            out(i, j) = std::clamp(theta(i, j), spec.inner_lower(), spec.inner_upper());
        }
    }
    return out;
}

namespace {

ProjectionBounds assemble_bounds(const Matrix& theta_max, const ActuatorLimits& limits,
                                 const Vector& m_bound, const Vector& l_bound,
                                 const Matrix& gamma, double safety, double zeta_frac,
                                 double eps_frac) {
    const Index r = m_bound.size();
    const Index m = limits.size();
    const Vector gains = gamma.diagonal();
    const double excitation = gains.dot(m_bound);  // sum_i Gamma_ii M_i

    ProjectionBounds bounds(r, m);
    for (Index j = 0; j < m; ++j) {
        const double rate_budget =
            safety * std::min(-limits.rate_min(j), limits.rate_max(j));
        const double passthrough = theta_max.col(j).dot(l_bound);
        if (passthrough >= rate_budget) {
            std::ostringstream why;
            why << "actuator " << j << " rate budget " << rate_budget
                << " is exhausted by the theta_max*L passthrough " << passthrough
                << "; reduce L or the magnitude bounds";
            throw std::invalid_argument(why.str());
        }
        const double y_abs = (rate_budget - passthrough) / excitation;
        for (Index i = 0; i < r; ++i) {
            BoundSpec theta_spec;
            theta_spec.upper = theta_max(i, j);
            theta_spec.lower = -theta_max(i, j);
            theta_spec.tolerance = zeta_frac * (theta_spec.upper - theta_spec.lower);
            bounds.theta_at(i, j) = theta_spec;

            BoundSpec y_spec;
            y_spec.upper = y_abs;
            y_spec.lower = -y_abs;
            y_spec.tolerance = eps_frac * (y_spec.upper - y_spec.lower);
            bounds.regressor_at(i, j) = y_spec;
        }
    }
    bounds.validate();
    return bounds;
}

void check_sizing_inputs(const ActuatorLimits& limits, const Vector& m_bound,
                         const Vector& l_bound, const Matrix& gamma) {
    limits.validate();
    if (m_bound.size() == 0 || m_bound.size() != l_bound.size()) {
        throw std::invalid_argument("M and L must share the virtual dimension");
    }
    if ((m_bound.array() <= 0.0).any() || (l_bound.array() <= 0.0).any()) {
        throw std::invalid_argument("M and L must be strictly positive");
    }
    if (gamma.rows() != m_bound.size() || gamma.cols() != m_bound.size() ||
        (gamma.diagonal().array() <= 0.0).any()) {
        throw std::invalid_argument("Gamma must be a positive diagonal r x r matrix");
    }
}

}  // namespace

ProjectionBounds bounds_from_actuator_limits(const ActuatorLimits& limits, const Vector& m_bound,
                                             const Vector& l_bound, const Matrix& gamma,
                                             double safety, double zeta_frac, double eps_frac) {
    check_sizing_inputs(limits, m_bound, l_bound, gamma);
    const Index r = m_bound.size();
    const Index m = limits.size();
    const double total_demand = m_bound.sum();

    Matrix theta_max(r, m);
    for (Index j = 0; j < m; ++j) {
        const double magnitude_budget = safety * std::min(-limits.u_min(j), limits.u_max(j));
        theta_max.col(j).setConstant(magnitude_budget / total_demand);
    }
    return assemble_bounds(theta_max, limits, m_bound, l_bound, gamma, safety, zeta_frac,
                           eps_frac);
}

ProjectionBounds bounds_from_reference_theta(const Matrix& theta_ref, const ActuatorLimits& limits,
                                             const Vector& m_bound, const Vector& l_bound,
                                             const Matrix& gamma, double safety, double zeta_frac,
                                             double eps_frac) {
    check_sizing_inputs(limits, m_bound, l_bound, gamma);
    const Index r = m_bound.size();
    const Index m = limits.size();
    if (theta_ref.rows() != r || theta_ref.cols() != m) {
        throw std::invalid_argument("theta_ref must be r x m");
    }

    Matrix theta_max(r, m);
    for (Index j = 0; j < m; ++j) {
        // Take the reference magnitudes as the bounds, with a floor so every
        // element keeps a usable adaptation range, then check the budget.
        Vector column = theta_ref.col(j).cwiseAbs();
        const double floor = std::max(1e-3, 0.05 * column.maxCoeff());
        theta_max.col(j) = column.cwiseMax(floor);

        const double magnitude_budget = safety * std::min(-limits.u_min(j), limits.u_max(j));
        if (theta_max.col(j).dot(m_bound) > magnitude_budget) {
            std::ostringstream why;
            why << "actuator " << j << " magnitude budget " << magnitude_budget
                << " cannot contain the reference allocation under the demand envelope "
                << "(needs " << theta_max.col(j).dot(m_bound) << "); reduce M or theta_ref";
            throw std::invalid_argument(why.str());
        }
    }
    return assemble_bounds(theta_max, limits, m_bound, l_bound, gamma, safety, zeta_frac,
                           eps_frac);
}

}  // namespace caproj

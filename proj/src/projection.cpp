#include "caproj/projection.hpp"

#include <algorithm>
#include <sstream>

namespace caproj {

namespace {

void require_same_shape(const Matrix& theta, const Matrix& y, const ProjectionBounds& bounds) {
    if (theta.rows() != y.rows() || theta.cols() != y.cols() ||
        theta.rows() != bounds.rows || theta.cols() != bounds.cols) {
        std::ostringstream why;
        why << "projection shape mismatch: theta " << theta.rows() << "x" << theta.cols()
            << ", y " << y.rows() << "x" << y.cols() << ", bounds " << bounds.rows << "x"
            << bounds.cols;
        throw std::invalid_argument(why.str());
    }
}

}  // namespace

double f_convex(double theta, const BoundSpec& spec) {
    spec.validate();
    const double num = (theta - spec.lower - spec.tolerance) * (theta - spec.upper + spec.tolerance);
    const double den = (spec.upper - spec.lower - spec.tolerance) * spec.tolerance;
    return num / den;
}

double df_dtheta(double theta, const BoundSpec& spec) {
    spec.validate();
    const double den = (spec.upper - spec.lower - spec.tolerance) * spec.tolerance;
    return (2.0 * theta - spec.lower - spec.upper) / den;
}

double h_convex(double y, const BoundSpec& spec) { return f_convex(y, spec); }

double proj_conventional(double theta, double y, const BoundSpec& spec) {
    const double f = f_convex(theta, spec);
    if (f > 0.0 && y * df_dtheta(theta, spec) > 0.0) {
        return y - y * f;
    }
    return y;
}

double proj_modified(double theta, double y, const BoundSpec& theta_spec,
                     const BoundSpec& y_spec) {
    const double f = f_convex(theta, theta_spec);
    const double h = h_convex(y, y_spec);
    const double outward = y * df_dtheta(theta, theta_spec);
    const double f_hat = std::min(1.0, f);
    const double h_hat = std::min(1.0, h);

    if (f >= 0.0 && outward >= 0.0 && h >= 0.0) {
        return y * (1.0 - f_hat) * (1.0 - h_hat);
    }
    if (f > 0.0 && outward > 0.0) {
        return y * (1.0 - f_hat);
    }
    if (h > 0.0) {
        return y * (1.0 - h_hat);
    }
    return y;
}

Matrix proj_conventional_matrix(const Matrix& theta, const Matrix& y,
                                const ProjectionBounds& bounds) {
    require_same_shape(theta, y, bounds);
    Matrix out(theta.rows(), theta.cols());
    for (Index i = 0; i < theta.rows(); ++i) {
        for (Index j = 0; j < theta.cols(); ++j) {
            out(i, j) = proj_conventional(theta(i, j), y(i, j), bounds.theta_at(i, j));
        }
    }
    return out;
}

Matrix proj_modified_matrix(const Matrix& theta, const Matrix& y,
                            const ProjectionBounds& bounds) {
    require_same_shape(theta, y, bounds);
    Matrix out(theta.rows(), theta.cols());
    for (Index i = 0; i < theta.rows(); ++i) {
        for (Index j = 0; j < theta.cols(); ++j) {
            out(i, j) = proj_modified(theta(i, j), y(i, j), bounds.theta_at(i, j),
                                      bounds.regressor_at(i, j));
        }
    }
    return out;
}

Matrix project(ProjectionKind kind, const Matrix& theta, const Matrix& y,
               const ProjectionBounds& bounds) {
    return kind == ProjectionKind::conventional ? proj_conventional_matrix(theta, y, bounds)
                                                : proj_modified_matrix(theta, y, bounds);
}

FeasibleSubset classify_subset(double theta, double y, const BoundSpec& theta_spec,
                               const BoundSpec& y_spec) {
    const double f = f_convex(theta, theta_spec);
    const double h = h_convex(y, y_spec);
    const double outward = y * df_dtheta(theta, theta_spec);
    if (f >= 0.0 && outward >= 0.0 && h >= 0.0) return FeasibleSubset::S3;
    if (f > 0.0 && outward > 0.0) return FeasibleSubset::S1;
    if (h > 0.0) return FeasibleSubset::S2;
    return FeasibleSubset::S0;
}

}  // namespace caproj

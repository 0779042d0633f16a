#include "caproj/bounds.hpp"

#include <sstream>

namespace caproj {

void BoundSpec::validate() const {
    std::ostringstream why;
    if (!(upper > 0.0) || !(lower < 0.0)) {
        why << "bound spec requires lower < 0 < upper, got [" << lower << ", " << upper << "]";
    } else if (!(tolerance > 0.0)) {
        why << "bound tolerance must be positive, got " << tolerance;
    } else if (!(tolerance < 0.5 * (upper - lower))) {
        why << "bound tolerance " << tolerance << " must be below half the range "
            << 0.5 * (upper - lower);
    } else if (!(upper - tolerance > 0.0) || !(lower + tolerance < 0.0)) {
        why << "tolerance band must leave the inner region straddling zero: ["
            << lower + tolerance << ", " << upper - tolerance << "]";
    } else {
        return;
    }
    throw std::invalid_argument(why.str());
}

ProjectionBounds ProjectionBounds::uniform(Index r, Index m, const BoundSpec& theta_spec,
                                           const BoundSpec& regressor_spec) {
    ProjectionBounds bounds(r, m);
    for (auto& spec : bounds.theta) spec = theta_spec;
    for (auto& spec : bounds.regressor) spec = regressor_spec;
    return bounds;
}

void ProjectionBounds::validate() const {
    if (rows <= 0 || cols <= 0) {
        throw std::invalid_argument("projection bounds must have positive dimensions");
    }
    const auto expected = static_cast<std::size_t>(rows * cols);
    if (theta.size() != expected || regressor.size() != expected) {
        throw std::invalid_argument("projection bound grids do not match the declared shape");
    }
    for (const auto& spec : theta) spec.validate();
    for (const auto& spec : regressor) spec.validate();
}

Matrix theta_tilde_max(const ProjectionBounds& bounds) {
    Matrix out(bounds.rows, bounds.cols);
    for (Index i = 0; i < bounds.rows; ++i) {
        for (Index j = 0; j < bounds.cols; ++j) {
            out(i, j) = bounds.theta_at(i, j).tilde_max();
        }
    }
    return out;
}

Matrix regressor_abs_max(const ProjectionBounds& bounds) {
    Matrix out(bounds.rows, bounds.cols);
    for (Index i = 0; i < bounds.rows; ++i) {
        for (Index j = 0; j < bounds.cols; ++j) {
            out(i, j) = bounds.regressor_at(i, j).abs_max();
        }
    }
    return out;
}

}  // namespace caproj

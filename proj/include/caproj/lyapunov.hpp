#pragma once

#include "caproj/types.hpp"

namespace caproj {

/// Solves A_m^T P + P A_m = -Q for symmetric positive definite P by
/// vectorizing into an r^2 x r^2 dense system. Requires a Hurwitz A_m and
/// symmetric positive definite Q; throws SolverError otherwise.
Matrix solve_lyapunov(const Matrix& a_m, const Matrix& q);

/// True if every eigenvalue of `a` has a strictly negative real part.
bool is_hurwitz(const Matrix& a);

}  // namespace caproj

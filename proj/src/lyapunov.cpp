#include "caproj/lyapunov.hpp"

#include <Eigen/Eigenvalues>

namespace caproj {

bool is_hurwitz(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0) return false;
    const Eigen::EigenSolver<Matrix> eigs(a, /*computeEigenvectors=*/false);
    return (eigs.eigenvalues().real().array() < 0.0).all();
}

Matrix solve_lyapunov(const Matrix& a_m, const Matrix& q) {
    const Index r = a_m.rows();
    if (a_m.cols() != r) throw std::invalid_argument("reference matrix must be square");
    if (q.rows() != r || q.cols() != r) throw std::invalid_argument("Q must match A_m");
    if (!q.isApprox(q.transpose(), 1e-12)) throw std::invalid_argument("Q must be symmetric");

    // vec(A_m^T P + P A_m) = (I (x) A_m^T + A_m^T (x) I) vec(P), column-major vec.
    const Index n = r * r;
    Matrix system = Matrix::Zero(n, n);
    const Matrix at = a_m.transpose();
    for (Index col = 0; col < r; ++col) {
        system.block(col * r, col * r, r, r) += at;
        for (Index k = 0; k < r; ++k) {
            system.block(col * r, k * r, r, r) += at(col, k) * Matrix::Identity(r, r);
        }
    }

    Vector rhs(n);
    for (Index col = 0; col < r; ++col) rhs.segment(col * r, r) = -q.col(col);

    const Eigen::FullPivLU<Matrix> lu(system);
    if (!lu.isInvertible()) {
        throw SolverError("Lyapunov system is singular; A_m is not Hurwitz");
    }
    const Vector vec_p = lu.solve(rhs);

    Matrix p(r, r);
    for (Index col = 0; col < r; ++col) p.col(col) = vec_p.segment(col * r, r);
    p = 0.5 * (p + p.transpose().eval());

    const Eigen::SelfAdjointEigenSolver<Matrix> eigs(p);
    if (eigs.info() != Eigen::Success || eigs.eigenvalues().minCoeff() <= 0.0) {
        throw SolverError("Lyapunov solution is not positive definite; A_m is not Hurwitz");
    }
    return p;
}

}  // namespace caproj

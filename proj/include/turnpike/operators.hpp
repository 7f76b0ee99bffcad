#pragma once

#include <Eigen/Core>

#include "turnpike/coefficients.hpp"
#include "turnpike/grid.hpp"
#include "turnpike/kernels.hpp"

namespace turnpike {

/// Tridiagonal discretization of A = -div(a grad .) + b grad . + p .  over the
/// interior nodes (conservative 3-point diffusion with interface values of a,
/// centered advection). The adjoint variant is the exact matrix transpose, so
/// discrete duality (Au, v) = (u, A*v) holds to rounding.
struct DiscreteOperator {
    Grid grid;
    std::vector<double> diag, sub, sup;  // sub[0] and sup[n-1] unused
    bool is_adjoint = false;

    int n() const { return grid.n_interior(); }
    Vec apply(const Vec& u) const;
    DiscreteOperator transpose() const;
    Mat dense() const;
};

DiscreteOperator assemble(const CoefficientField& coeffs, const Grid& g, bool adjoint);

/// Mass-lumped L2 geometry: (u, v) = dx * sum_i u_i v_i.
double l2_inner(const Vec& u, const Vec& v, const Grid& g);
double l2_norm(const Vec& u, const Grid& g);

/// Thomas factorization of (alpha I + beta A); alpha=0, beta=1 gives A itself.
TridiagFactor shifted_factor(const DiscreteOperator& op, double alpha, double beta);

/// Direct tridiagonal solve of op u = rhs with a relative-residual guard of
/// 1e-12; throws on near-singular systems.
Vec elliptic_solve(const DiscreteOperator& op, const Vec& rhs);

/// Smallest singular value of the operator matrix (inverse power iteration on
/// A^T A through two tridiagonal solves per step). Returns ~0 when the
/// factorization already fails. Diagnostic for Ker(A*) = {0}.
double check_wellposedness(const DiscreteOperator& op_adjoint);

/// Smallest eigenvalue of a symmetrizable operator, inverse power iteration
/// polished by Rayleigh-quotient steps to near machine precision.
double smallest_eigenvalue(const DiscreteOperator& op);

/// Real eigendecomposition A = V diag(lam) V^inv obtained by diagonal
/// symmetrization of the tridiagonal matrix. Requires sub*sup products to be
/// positive (mesh Peclet below 2 for centered advection).
struct EigenBasis {
    Vec lam;
    Mat V;     // columns are eigenvectors
    Mat Vinv;
};

EigenBasis eigen_basis(const DiscreteOperator& op);

}  // namespace turnpike

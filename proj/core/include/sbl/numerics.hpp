#pragma once

#include <optional>

#include "sbl/types.hpp"

namespace sbl::numerics {

// Largest singular value of M, to ~1e-10 relative accuracy.
//
// Power iteration on the Gram matrix with a deterministic seeded start
// vector; falls back to a full SVD if the Rayleigh quotient stagnates
// before reaching the requested accuracy (clustered spectra).
double spectral_norm(const Matrix& M);

// Modified Gram-Schmidt with one re-orthogonalization pass. Columns whose
// remainder after projection falls below drop_tol * (1 + original norm)
// are dropped. Returns a matrix with orthonormal columns (possibly fewer
// than the input).
Matrix orthonormalize(const Matrix& cols, double drop_tol = 1e-10);

// A linear subspace given by an orthonormal basis (one column per basis
// vector). An empty basis (0 columns) is the trivial subspace {0}.
struct Subspace {
  Matrix basis;

  int ambient_dim() const { return static_cast<int>(basis.rows()); }
  int dim() const { return static_cast<int>(basis.cols()); }
};

Subspace make_subspace(const Matrix& spanning_cols, double drop_tol = 1e-10);

// || (I - QQ^T) x ||, the distance from x to the subspace.
double membership_residual(const Subspace& S, const Vector& x);

// Residual test with the scale-aware tolerance tol * (1 + ||x||).
bool contains(const Subspace& S, const Vector& x, double tol = 1e-8);

// Orthogonal V with V z = z for every z in `fixed` and V*xbar in `target`,
// where fixed is a subspace of target. V is the identity when xbar already
// lies in target; otherwise V is a single plane rotation supported on
// fixed's orthogonal complement. Throws std::invalid_argument if the
// containment precondition fails, and std::runtime_error("no room to
// rotate") when xbar is outside target but target offers no direction
// orthogonal to fixed.
Matrix subspace_fixing_rotation(const Subspace& fixed, const Subspace& target,
                                const Vector& xbar, double tol = 1e-9);

// Euclidean projection onto the centered ball of the given radius
// (radius may be +inf, in which case x is returned unchanged).
Vector project_ball(const Vector& x, double radius);

struct BallQpResult {
  Vector argmin;
  double value = 0.0;
  // Fixed-point residual || proj_ball(x - grad q(x)) - x || of the reported
  // minimizer; callers can check it against 1e-8 * (1 + ||h - c||).
  double residual = 0.0;
};

// Minimize q(x) = 0.5 x^T H x - h^T x + c^T x over the centered ball
// ||x|| <= radius, for positive semidefinite H. Interior solutions come
// from a (pseudo-)solve; boundary solutions from the secular equation in
// the eigenbasis of H, solved by safeguarded Newton.
BallQpResult min_quadratic_over_ball(const Matrix& H, const Vector& h,
                                     const Vector& c, double radius);

// Same solver with the eigendecomposition of H computed once and reused
// across many right-hand sides (dual-value evaluations along a trajectory).
class BallQuadraticMinimizer {
 public:
  explicit BallQuadraticMinimizer(const Matrix& H);
  BallQpResult minimize(const Vector& h, const Vector& c, double radius) const;

 private:
  Matrix eigvecs_;
  Vector eigvals_;
};

}  // namespace sbl::numerics

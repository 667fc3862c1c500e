#pragma once

#include <string>

#include "sbl/instances.hpp"
#include "sbl/numerics.hpp"
#include "sbl/types.hpp"

namespace sbl::krylov {

// The nested pair J_i = span{c, (LL')c, ..., (LL')^i c} in R^m and
// K_i = L' J_i in R^n, for the structured (Lambda, c) of the hard instances.
struct KrylovPair {
  numerics::Subspace J;
  numerics::Subspace K;
  int order = 0;
};

// Numeric construction by Arnoldi-style recursion with full
// re-orthogonalization (raw power vectors lose rank long before the spaces
// stop growing). Throws std::invalid_argument if the space saturates before
// reaching the requested order, which happens exactly when i > 2k-1.
KrylovPair krylov_pair(const Matrix& Lambda, const Vector& c, int i);

// Closed-form orthonormal bases, valid for 0 <= i <= 2k-1 and m > 2k:
//   J_i = span{e_1, ..., e_i, (e_{i+1} + ... + e_{2k}) / sqrt(2k-i)}
//   K_i = span{e_{2k-i}, ..., e_{2k}}
// (indices 1-based). Both have dimension i+1.
Matrix closed_J_basis(int m, int k, int i);
Matrix closed_K_basis(int n, int k, int i);

struct Membership {
  bool member = false;
  double residual = 0.0;
};

// residual = distance from x to S; member iff residual <= 1e-8 (1 + |x|).
Membership membership(const Vector& x, const numerics::Subspace& S);

// Quantities whose exact minimum over K_{k-1} certifies the lower bounds:
//   obj_abs : min |f - f*|            (ECO-I; f vanishes on K_{k-1})
//   obj     : min f                   (ECO-II)
//   feas    : min |Ax - b|            (any kind)
//   dist2   : min |x - x*|^2          (strongly convex kinds)
//   phi_gap : min phi - phi*          (saddle kinds)
enum class Quantity { obj_abs, obj, feas, dist2, phi_gap };

std::string to_string(Quantity q);

// Certified closed-form value of the quantity over K_{k-1}. For
// (SPP-II, phi_gap) and (SPP-SC, phi_gap) the closed form is a proven lower
// bound rather than the exact minimum; all other combinations are exact.
// Every call cross-checks against the numeric minimizer: exact values must
// agree to 1e-7 and bound values must be dominated, else std::logic_error.
// Incompatible (kind, quantity) -> std::invalid_argument.
double min_over_K(const instances::Instance& inst, Quantity q);

// Brute-force minimum over K_{k-1}, computed in the k-dimensional coordinate
// chart given by the closed-form basis (least squares / pseudo-solve for the
// smooth quantities, damped Newton for the saddle objective).
double min_over_K_numeric(const instances::Instance& inst, Quantity q);

}  // namespace sbl::krylov

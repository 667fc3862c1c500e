#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sbl/types.hpp"

namespace sbl::instances {

// The six hard-instance families. ECO-* are linearly constrained smooth
// problems (min f(x) s.t. Ax = b, feasible sets unbounded); SPP-* are their
// ball-constrained saddle-point counterparts
// min_{||x||<=R_X} max_{||y||<=R_Y} f(x) + <b - Ax, y>.
enum class Kind { eco_i, eco_ii, eco_sc, spp_i, spp_ii, spp_sc };

std::string to_string(Kind kind);
Kind kind_from_string(std::string_view name);  // accepts e.g. "ECO-I", "eco-i"
bool is_saddle(Kind kind);
bool is_strongly_convex(Kind kind);
std::vector<Kind> all_kinds();

struct Instance {
  Kind kind = Kind::eco_i;
  int m = 0;  // rows of A
  int n = 0;  // columns of A; x lives in R^n
  int k = 0;  // difficulty parameter; the band block of A is 2k x 2k
  double L_f = 0.0;   // smoothness constant of f (= mu for the SC kinds)
  double L_A = 0.0;   // operator norm of A
  double mu = 0.0;    // strong convexity modulus (0 for non-SC kinds)
  double X_radius = kUnbounded;
  double Y_radius = kUnbounded;
  Matrix H;  // f(x) = 0.5 x'Hx - h'x
  Vector h;
  Matrix A;
  Vector b;
};

struct ClosedFormSolution {
  Vector x_star;
  Vector y_star;       // multiplier (ECO) / dual maximizer (SPP)
  double opt_value = 0.0;  // f* for ECO kinds, phi* for SPP kinds
  double x_norm_sq = 0.0;
  double y_norm_sq = 0.0;
};

// The 2k x 2k anti-diagonal band matrix: column i (1-based, i < 2k) is
// e_{2k-i+1} - e_{2k-i}, column 2k is e_1. Its inverse is the all-ones
// lower anti-triangular matrix and its spectral norm is below 2.
Matrix make_B(int k);

// Lambda = blockdiag(B, G) in R^{m x n} with G = 2 [I | 0], together with
// c = (ones(2k); zeros(m-2k)). ||Lambda|| = 2 for every admissible shape.
struct LambdaC {
  Matrix Lambda;
  Vector c;
};
LambdaC make_lambda_c(int m, int n, int k);

// Default shape for a given difficulty parameter: m = 2k + 2, n = m + 8.
struct Dims {
  int m = 0;
  int n = 0;
};
Dims default_dims(int k);

// Builds the instance A = (L_A/2) Lambda, b = (L_A/2) c with the
// kind-specific (H, h) and ball radii. Preconditions (checked):
// 2k < m <= n, and per kind
//   eco_i / spp_i:  L_f > 0, L_A > 0
//   eco_ii / spp_ii: L_f > 0, L_A >= 0, L_f >= L_A
//   eco_sc / spp_sc: mu > 0, L_A > 0 (L_f is taken to be mu)
Instance make_instance(Kind kind, int m, int n, int k, double L_f, double L_A,
                       double mu = 0.0);

// Exact optimal primal/dual pair and objective value; all entries are exact
// in double precision (small integers and simple radicals).
ClosedFormSolution closed_form(const Instance& inst);

// Stationarity + feasibility (+ ball membership for SPP kinds) residual of
// a candidate solution pair.
double kkt_residual(const Instance& inst, const Vector& x, const Vector& y);

// The instance under the orthogonal change of variables x -> Ux, y -> Vy:
// H -> U'HU, A -> V'AU, with h and b unchanged. Requires U, V orthogonal
// with Uh = h and Vb = b (checked to 1e-9); the closed-form solution maps
// to (U'x*, V'y*).
Instance rotate_instance(const Instance& inst, const Matrix& U,
                         const Matrix& V);

struct Evaluation {
  double f = 0.0;
  Vector grad_f;
  Vector residual;  // Ax - b
  double feas = 0.0;
  // Primal value: f for ECO kinds (feasibility reported separately),
  // f + R_Y ||Ax - b|| for SPP kinds.
  double phi = 0.0;
  // Dual value: min_x f(x) + <b - Ax, y> over R^n (ECO; -inf when the
  // stationarity system is inconsistent) or over the X ball (SPP).
  double psi = 0.0;
};

Evaluation evaluate(const Instance& inst, const Vector& x, const Vector& y);

// Same as evaluate() but with the spectral decomposition of H prepared once;
// use for per-iterate metrics along long trajectories.
class Evaluator {
 public:
  explicit Evaluator(const Instance& inst);
  ~Evaluator();
  Evaluator(Evaluator&&) noexcept;
  Evaluator& operator=(Evaluator&&) noexcept;

  Evaluation operator()(const Vector& x, const Vector& y) const;
  double phi(const Vector& x) const;
  double psi(const Vector& y) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Structural invariants: shape constraints, ||A|| = L_A (1e-8), ||H|| <= L_f
// + 1e-8, H symmetric, closed-form solution passes KKT at 1e-9 and matches
// the norm formulas at 1e-10 relative. Returns human-readable violations
// (empty = pass).
std::vector<std::string> verify_instance(const Instance& inst);

// File-level verification: structural invariants plus the stored solution
// block (KKT, norm formulas, radii). Works for rotated instances too, since
// the stored solution is checked against the stored matrices.
std::vector<std::string> verify_instance_file(const std::string& path);

void save_instance(const Instance& inst, const std::string& path);
void save_instance(const Instance& inst, const ClosedFormSolution& sol,
                   const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace sbl::instances

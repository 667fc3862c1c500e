#include "sbl/krylov.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sbl::krylov {

using instances::Instance;
using instances::Kind;
using numerics::Subspace;

KrylovPair krylov_pair(const Matrix& Lambda, const Vector& c, int i) {
  if (i < 0) throw std::invalid_argument("krylov_pair: order must be >= 0");
  if (Lambda.rows() != c.size()) {
    throw std::invalid_argument("krylov_pair: c must live in the row space");
  }
  const int m = static_cast<int>(Lambda.rows());
  if (c.norm() == 0.0) {
    throw std::invalid_argument("krylov_pair: zero seed vector");
  }

  Matrix Q(m, i + 1);
  Q.col(0) = c / c.norm();
  for (int j = 1; j <= i; ++j) {
    // Next generator from the last orthonormal vector; spans the same
    // space as the raw powers but keeps full rank numerically.
    Vector w = Lambda * (Lambda.transpose() * Q.col(j - 1));
    const double scale = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
      w -= Q.leftCols(j) * (Q.leftCols(j).transpose() * w);
    }
    if (w.norm() <= 1e-10 * (1.0 + scale)) {
      std::ostringstream os;
      os << "krylov_pair: space saturated at order " << j - 1
         << "; generator " << j << " adds no direction (need i <= 2k-1)";
      throw std::invalid_argument(os.str());
    }
    Q.col(j) = w / w.norm();
  }

  KrylovPair out;
  out.order = i;
  out.J.basis = Q;
  out.K = numerics::make_subspace(Lambda.transpose() * Q);
  return out;
}

Matrix closed_J_basis(int m, int k, int i) {
  if (k < 1 || i < 0 || i > 2 * k - 1 || m < 2 * k) {
    throw std::invalid_argument("closed_J_basis: need 0 <= i <= 2k-1, m >= 2k");
  }
  Matrix Q = Matrix::Zero(m, i + 1);
  for (int j = 0; j < i; ++j) Q(j, j) = 1.0;
  const double s = 1.0 / std::sqrt(static_cast<double>(2 * k - i));
  for (int r = i; r < 2 * k; ++r) Q(r, i) = s;
  return Q;
}

Matrix closed_K_basis(int n, int k, int i) {
  if (k < 1 || i < 0 || i > 2 * k - 1 || n < 2 * k) {
    throw std::invalid_argument("closed_K_basis: need 0 <= i <= 2k-1, n >= 2k");
  }
  Matrix Q = Matrix::Zero(n, i + 1);
  for (int j = 0; j <= i; ++j) Q(2 * k - i - 1 + j, j) = 1.0;
  return Q;
}

Membership membership(const Vector& x, const Subspace& S) {
  Membership out;
  out.residual = numerics::membership_residual(S, x);
  out.member = out.residual <= 1e-8 * (1.0 + x.norm());
  return out;
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::obj_abs: return "obj_abs";
    case Quantity::obj: return "obj";
    case Quantity::feas: return "feas";
    case Quantity::dist2: return "dist2";
    case Quantity::phi_gap: return "phi_gap";
  }
  throw std::logic_error("to_string: unknown quantity");
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void require_compatible(const Instance& inst, Quantity q) {
  bool ok = false;
  switch (q) {
    case Quantity::obj_abs: ok = inst.kind == Kind::eco_i; break;
    case Quantity::obj: ok = inst.kind == Kind::eco_ii; break;
    case Quantity::feas: ok = true; break;
    case Quantity::dist2: ok = instances::is_strongly_convex(inst.kind); break;
    case Quantity::phi_gap: ok = instances::is_saddle(inst.kind); break;
  }
  if (!ok) {
    throw std::invalid_argument("min_over_K: quantity '" + to_string(q) +
                                "' is undefined for kind " +
                                instances::to_string(inst.kind));
  }
}

double closed_value(const Instance& inst, Quantity q) {
  const double k = static_cast<double>(inst.k);
  switch (q) {
    case Quantity::obj_abs:
      // f vanishes identically on K_{k-1}, so the best objective error
      // equals the optimal value itself.
      return inst.L_f * k * k / 2.0;
    case Quantity::obj:
      return -0.125 *
             (inst.L_f + kSqrt2 * inst.L_A +
              (inst.L_A > 0.0 ? inst.L_A * inst.L_A / (2.0 * inst.L_f) : 0.0)) *
             k;
    case Quantity::feas:
      return inst.L_A / 2.0 * std::sqrt(k);
    case Quantity::dist2:
      return k * (k + 1.0) * (2.0 * k + 1.0) / 6.0;
    case Quantity::phi_gap:
      switch (inst.kind) {
        case Kind::spp_i:
          // On K_{k-1} the objective part vanishes and the best residual is
          // attained at the same point, so the gap collapses to a clean
          // closed form: R_Y (L_A/2) sqrt(k) - f* = L_f k^2 / 2.
          return inst.L_f * k * k / 2.0;
        case Kind::spp_ii: {
          const double rx = inst.X_radius;
          const double ry = inst.Y_radius;
          return inst.L_f * rx * rx / (16.0 * (2.0 * k + 1.0) * (2.0 * k + 1.0)) +
                 (kSqrt2 + 2.0) / 4.0 * inst.L_A * rx * ry / (2.0 * k + 1.0);
        }
        case Kind::spp_sc:
          // Strong convexity of phi transfers the distance bound:
          // phi(x) - phi* >= (mu/2) |x - x*|^2.
          return inst.mu / 2.0 * k * (k + 1.0) * (2.0 * k + 1.0) / 6.0;
        default:
          break;
      }
      break;
  }
  throw std::logic_error("min_over_K: unhandled combination");
}

bool closed_value_is_exact(const Instance& inst, Quantity q) {
  if (q != Quantity::phi_gap) return true;
  return inst.kind == Kind::spp_i;
}

// Minimize 0.5 z'Hz - h'z + w |Mz - r0| by damped Newton with Armijo
// backtracking. With w = 0 this is a plain quadratic pseudo-solve done in
// one step. The norm term is smooth along the whole path here because the
// residual never vanishes on the chart when w > 0.
double chart_minimize(const Matrix& H, const Vector& h, const Matrix& M,
                      const Vector& r0, double w, Vector z) {
  const auto value = [&](const Vector& p) {
    double v = 0.5 * p.dot(H * p) - h.dot(p);
    if (w > 0.0) v += w * (M * p - r0).norm();
    return v;
  };
  const int d = static_cast<int>(z.size());
  double fz = value(z);
  for (int it = 0; it < 500; ++it) {
    Vector grad = H * z - h;
    Matrix hess = H;
    if (w > 0.0) {
      const Vector r = M * z - r0;
      const double rn = r.norm();
      if (rn > 1e-14) {
        grad += w * M.transpose() * r / rn;
        hess += w * (M.transpose() * M / rn -
                     M.transpose() * r * r.transpose() * M / (rn * rn * rn));
      }
    }
    const double gn = grad.norm();
    if (gn <= 1e-12 * (1.0 + std::abs(fz))) break;
    Vector dir = -(hess + 1e-12 * Matrix::Identity(d, d))
                      .ldlt()
                      .solve(grad);
    if (!dir.allFinite() || dir.dot(grad) > -1e-16 * gn * dir.norm()) {
      dir = -grad;
    }
    double step = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Vector cand = z + step * dir;
      const double fc = value(cand);
      if (fc <= fz + 1e-4 * step * grad.dot(dir)) {
        z = cand;
        fz = fc;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return fz;
}

}  // namespace

double min_over_K_numeric(const Instance& inst, Quantity q) {
  require_compatible(inst, q);
  const Matrix E = closed_K_basis(inst.n, inst.k, inst.k - 1);
  const Matrix Hc = E.transpose() * inst.H * E;
  const Vector hc = E.transpose() * inst.h;
  const Matrix M = inst.A * E;
  const instances::ClosedFormSolution sol = instances::closed_form(inst);

  switch (q) {
    case Quantity::feas: {
      const Vector z = M.colPivHouseholderQr().solve(inst.b);
      return (M * z - inst.b).norm();
    }
    case Quantity::dist2: {
      const Vector residual = sol.x_star - E * (E.transpose() * sol.x_star);
      return residual.squaredNorm();
    }
    case Quantity::obj: {
      return chart_minimize(Hc, hc, M, inst.b, 0.0, Vector::Zero(inst.k));
    }
    case Quantity::obj_abs: {
      const double f_star = sol.opt_value;
      if (Hc.cwiseAbs().maxCoeff() <= 1e-13 && hc.norm() <= 1e-13) {
        return std::abs(f_star);  // f is identically zero on the chart
      }
      const double fmin =
          chart_minimize(Hc, hc, M, inst.b, 0.0, Vector::Zero(inst.k));
      // f is convex and unbounded above on the chart, so its range is
      // [fmin, inf); the closest value to f* is either f* itself or fmin.
      return std::max(0.0, fmin - f_star);
    }
    case Quantity::phi_gap: {
      Vector z0 = E.transpose() * sol.x_star;
      const double fmin =
          chart_minimize(Hc, hc, M, inst.b, inst.Y_radius, std::move(z0));
      const double from_zero = chart_minimize(Hc, hc, M, inst.b, inst.Y_radius,
                                              Vector::Zero(inst.k));
      return std::min(fmin, from_zero) - sol.opt_value;
    }
  }
  throw std::logic_error("min_over_K_numeric: unhandled quantity");
}

double min_over_K(const Instance& inst, Quantity q) {
  require_compatible(inst, q);
  const double closed = closed_value(inst, q);
  const double numeric = min_over_K_numeric(inst, q);
  const double tol = 1e-7 * (1.0 + std::abs(closed));
  if (closed_value_is_exact(inst, q)) {
    if (std::abs(closed - numeric) > tol) {
      std::ostringstream os;
      os << "min_over_K(" << to_string(q) << "): closed form " << closed
         << " disagrees with numeric minimum " << numeric;
      throw std::logic_error(os.str());
    }
  } else if (numeric < closed - tol) {
    std::ostringstream os;
    os << "min_over_K(" << to_string(q) << "): certified bound " << closed
       << " exceeds numeric minimum " << numeric;
    throw std::logic_error(os.str());
  }
  return closed;
}

}  // namespace sbl::krylov

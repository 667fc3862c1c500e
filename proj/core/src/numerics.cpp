#include "sbl/numerics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace sbl::numerics {

namespace {

constexpr std::uint64_t kSpectralSeed = 0x5EED;

Vector seeded_unit_vector(int n) {
  std::mt19937_64 rng(kSpectralSeed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  double nrm = v.norm();
  if (nrm == 0.0) v.setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  else v /= nrm;
  return v;
}

}  // namespace

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  const double scale = M.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;

  // Small problems: a full SVD is exact and cheap.
  if (std::min(M.rows(), M.cols()) <= 16) {
    return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
  }

  // Work with the smaller Gram matrix.
  const bool wide = M.rows() < M.cols();
  const Matrix G = wide ? Matrix(M * M.transpose()) : Matrix(M.transpose() * M);
  const int n = static_cast<int>(G.rows());

  Vector v = seeded_unit_vector(n);
  double lambda = 0.0;
  const int max_iter = 20000;
  for (int it = 0; it < max_iter; ++it) {
    Vector Gv = G * v;
    double next = v.dot(Gv);
    double res = (Gv - next * v).norm();
    // Residual bound: some eigenvalue of G lies within `res` of the Rayleigh
    // quotient, and power iteration only increases it, so a small residual
    // certifies the dominant eigenvalue to the requested accuracy.
    if (res <= 1e-11 * std::max(next, 1e-300)) {
      lambda = next;
      return std::sqrt(std::max(lambda, 0.0));
    }
    double nrm = Gv.norm();
    if (nrm == 0.0) return 0.0;
    v = Gv / nrm;
    lambda = next;
  }
  // Clustered spectrum stalled the iteration; fall back to a full SVD.
  return Eigen::BDCSVD<Matrix>(M).singularValues()(0);
}

Matrix orthonormalize(const Matrix& cols, double drop_tol) {
  const int n = static_cast<int>(cols.rows());
  Matrix Q(n, cols.cols());
  int kept = 0;
  for (int j = 0; j < cols.cols(); ++j) {
    Vector v = cols.col(j);
    const double orig = v.norm();
    // Two projection passes (classical re-orthogonalization).
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < kept; ++i) {
        v -= Q.col(i).dot(v) * Q.col(i);
      }
    }
    const double rem = v.norm();
    if (rem <= drop_tol * (1.0 + orig)) continue;
    Q.col(kept++) = v / rem;
  }
  return Q.leftCols(kept);
}

Subspace make_subspace(const Matrix& spanning_cols, double drop_tol) {
  return Subspace{orthonormalize(spanning_cols, drop_tol)};
}

double membership_residual(const Subspace& S, const Vector& x) {
  if (S.dim() == 0) return x.norm();
  return (x - S.basis * (S.basis.transpose() * x)).norm();
}

bool contains(const Subspace& S, const Vector& x, double tol) {
  return membership_residual(S, x) <= tol * (1.0 + x.norm());
}

Matrix subspace_fixing_rotation(const Subspace& fixed, const Subspace& target,
                                const Vector& xbar, double tol) {
  const int n = fixed.ambient_dim();
  if (target.ambient_dim() != n || xbar.size() != n) {
    throw std::invalid_argument(
        "subspace_fixing_rotation: ambient dimensions disagree");
  }
  for (int j = 0; j < fixed.dim(); ++j) {
    if (membership_residual(target, fixed.basis.col(j)) > tol * 2.0) {
      throw std::invalid_argument(
          "subspace_fixing_rotation: fixed subspace is not contained in target");
    }
  }

  Matrix V = Matrix::Identity(n, n);
  if (membership_residual(target, xbar) <= tol * (1.0 + xbar.norm())) {
    return V;  // already inside target; nothing to do
  }

  // Component of xbar orthogonal to the fixed subspace. It is nonzero here
  // because xbar is outside target (hence outside fixed).
  Vector y = xbar;
  if (fixed.dim() > 0) y -= fixed.basis * (fixed.basis.transpose() * xbar);

  // Room to rotate into: target ∩ fixed^⊥.
  Matrix Wcols = target.basis;
  if (fixed.dim() > 0) {
    Wcols -= fixed.basis * (fixed.basis.transpose() * target.basis);
  }
  const Matrix W = orthonormalize(Wcols, 1e-12);
  if (W.cols() == 0) {
    throw std::runtime_error("no room to rotate");
  }

  const Vector yt = W * (W.transpose() * y);  // part of y already in target
  const Vector yp = y - yt;                   // part sticking out of target
  const double yp_norm = yp.norm();
  // yp must be nonzero (xbar is outside target); guard regardless.
  if (yp_norm <= tol * (1.0 + xbar.norm())) return V;
  const Vector u = yp / yp_norm;

  // Pick the rotation partner w in the room: orthogonal to yt when the room
  // allows it (then a quarter turn suffices), otherwise along yt itself
  // (then the angle absorbs yt's length).
  Vector w;
  const double yt_norm = yt.norm();
  if (yt_norm <= tol) {
    w = W.col(0);
  } else {
    const Vector yt_hat = yt / yt_norm;
    int best = -1;
    double best_rem = 0.0;
    for (int j = 0; j < W.cols(); ++j) {
      Vector cand = W.col(j) - yt_hat.dot(W.col(j)) * yt_hat;
      const double rem = cand.norm();
      if (rem > best_rem) {
        best_rem = rem;
        best = j;
        w = cand / rem;
      }
    }
    if (best < 0 || best_rem <= 1e-10) w = yt_hat;
  }

  // Rotate the in-plane part of y onto w. With a = in-plane component of y,
  // the rotation by angle(a, w) inside span{u, w} maps a to ||a|| w and
  // leaves the plane's orthogonal complement (which includes `fixed` and the
  // rest of target) untouched.
  const double a_u = u.dot(y);   // = ||yp||
  const double a_w = w.dot(y);
  const double a_norm = std::hypot(a_u, a_w);
  const double c = a_w / a_norm;
  const double s = a_u / a_norm;

  V += (c - 1.0) * (u * u.transpose() + w * w.transpose());
  V += s * (w * u.transpose() - u * w.transpose());
  return V;
}

Vector project_ball(const Vector& x, double radius) {
  if (!std::isfinite(radius)) return x;
  const double nrm = x.norm();
  if (nrm <= radius) return x;
  return x * (radius / nrm);
}

BallQuadraticMinimizer::BallQuadraticMinimizer(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  eigvecs_ = es.eigenvectors();
  eigvals_ = es.eigenvalues();
  const double lmax = eigvals_.size() ? std::max(eigvals_.maxCoeff(), 0.0) : 0.0;
  if (eigvals_.size() && eigvals_.minCoeff() < -1e-10 * std::max(lmax, 1.0)) {
    throw std::invalid_argument(
        "min_quadratic_over_ball: H is not positive semidefinite");
  }
}

BallQpResult BallQuadraticMinimizer::minimize(const Vector& h, const Vector& c,
                                              double radius) const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument(
        "min_quadratic_over_ball: radius must be positive and finite");
  }
  const Vector g = h - c;  // minimize 0.5 x'Hx - g'x
  const int n = static_cast<int>(g.size());
  const Vector gt = eigvecs_.transpose() * g;
  const double lmax = std::max(eigvals_.maxCoeff(), 0.0);
  const double lcut = 1e-12 * std::max(lmax, 1.0);

  // Interior candidate: least-norm stationary point, valid when g has no
  // component in the kernel of H.
  bool consistent = true;
  Vector xt(n);
  for (int i = 0; i < n; ++i) {
    const double lam = std::max(eigvals_(i), 0.0);
    if (lam > lcut) {
      xt(i) = gt(i) / lam;
    } else {
      xt(i) = 0.0;
      if (std::abs(gt(i)) > 1e-13 * (1.0 + g.norm())) consistent = false;
    }
  }
  double nu = 0.0;
  if (!consistent || xt.norm() > radius) {
    // Boundary: solve sum_i gt_i^2 / (lam_i + nu)^2 = radius^2 for nu > 0.
    auto norm_at = [&](double v) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = std::max(eigvals_(i), 0.0) + v;
        s += (gt(i) * gt(i)) / (d * d);
      }
      return std::sqrt(s);
    };
    double lo = 0.0;
    double hi = std::max(g.norm() / radius, 1e-300);
    while (norm_at(hi) > radius) hi *= 2.0;  // paranoia; lo bound already works
    // Safeguarded Newton on 1/radius - 1/||x(nu)|| (Moré–Sorensen form).
    nu = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      double nrm = norm_at(nu);
      if (std::abs(nrm - radius) <= 1e-14 * radius) break;
      if (nrm > radius) lo = nu; else hi = nu;
      double dn2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = std::max(eigvals_(i), 0.0) + nu;
        dn2 += -2.0 * (gt(i) * gt(i)) / (d * d * d);
      }
      const double phi = 1.0 / radius - 1.0 / nrm;
      const double dphi = 0.5 * dn2 / (nrm * nrm * nrm);
      double next = (dphi != 0.0) ? nu - phi / dphi : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      nu = next;
    }
    for (int i = 0; i < n; ++i) {
      xt(i) = gt(i) / (std::max(eigvals_(i), 0.0) + nu);
    }
  }

  BallQpResult out;
  out.argmin = eigvecs_ * xt;
  double quad = 0.0;
  for (int i = 0; i < n; ++i) {
    quad += 0.5 * std::max(eigvals_(i), 0.0) * xt(i) * xt(i) - gt(i) * xt(i);
  }
  out.value = quad;
  const Vector grad = eigvecs_ * (eigvals_.cwiseMax(0.0).cwiseProduct(xt)) - g;
  out.residual = (project_ball(out.argmin - grad, radius) - out.argmin).norm();
  return out;
}

BallQpResult min_quadratic_over_ball(const Matrix& H, const Vector& h,
                                     const Vector& c, double radius) {
  return BallQuadraticMinimizer(H).minimize(h, c, radius);
}

}  // namespace sbl::numerics

#include "sbl/instances.hpp"

#include <Eigen/Eigenvalues>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sbl/numerics.hpp"

namespace sbl::instances {

using numerics::BallQpResult;
using numerics::BallQuadraticMinimizer;
using numerics::spectral_norm;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

long long odd_square_pyramid(long long k) {
  // sum of the first 2k squares... not quite: this is k(2k+1)(4k+1)/3,
  // the exact value of |x*|^2 = 1^2 + ... + (2k)^2.
  return k * (2 * k + 1) * (4 * k + 1) / 3;
}

}  // namespace

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::eco_i: return "ECO-I";
    case Kind::eco_ii: return "ECO-II";
    case Kind::eco_sc: return "ECO-SC";
    case Kind::spp_i: return "SPP-I";
    case Kind::spp_ii: return "SPP-II";
    case Kind::spp_sc: return "SPP-SC";
  }
  throw std::logic_error("to_string: unknown kind");
}

Kind kind_from_string(std::string_view name) {
  std::string s;
  s.reserve(name.size());
  for (char c : name) {
    if (c == '_') c = '-';
    s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (s == "ECO-I") return Kind::eco_i;
  if (s == "ECO-II") return Kind::eco_ii;
  if (s == "ECO-SC") return Kind::eco_sc;
  if (s == "SPP-I") return Kind::spp_i;
  if (s == "SPP-II") return Kind::spp_ii;
  if (s == "SPP-SC") return Kind::spp_sc;
  throw std::invalid_argument("unknown instance kind '" + std::string(name) +
                              "'");
}

bool is_saddle(Kind kind) {
  return kind == Kind::spp_i || kind == Kind::spp_ii || kind == Kind::spp_sc;
}

bool is_strongly_convex(Kind kind) {
  return kind == Kind::eco_sc || kind == Kind::spp_sc;
}

std::vector<Kind> all_kinds() {
  return {Kind::eco_i, Kind::eco_ii, Kind::eco_sc,
          Kind::spp_i, Kind::spp_ii, Kind::spp_sc};
}

Matrix make_B(int k) {
  if (k < 1) throw std::invalid_argument("make_B: k must be >= 1");
  const int d = 2 * k;
  Matrix B = Matrix::Zero(d, d);
  // Column i (1-based) for i < 2k is the difference e_{2k-i+1} - e_{2k-i};
  // the last column is e_1.  Column sums telescope to e_{2k} and row sums
  // to e_1, so B maps the all-ones vector onto a single coordinate.
  for (int i = 1; i <= d - 1; ++i) {
    B(d - i, i - 1) = 1.0;
    B(d - i - 1, i - 1) = -1.0;
  }
  B(0, d - 1) = 1.0;
  return B;
}

LambdaC make_lambda_c(int m, int n, int k) {
  if (k < 1) throw std::invalid_argument("make_lambda_c: k must be >= 1");
  if (!(2 * k < m)) {
    throw std::invalid_argument("make_lambda_c: need m > 2k");
  }
  if (!(m <= n)) throw std::invalid_argument("make_lambda_c: need n >= m");
  LambdaC out;
  out.Lambda = Matrix::Zero(m, n);
  out.Lambda.topLeftCorner(2 * k, 2 * k) = make_B(k);
  // Trailing block: twice an identity padded with zero columns.  Its rows are
  // orthogonal to the leading block, its columns have norm exactly 2, and it
  // keeps the overall operator norm at 2 regardless of k.
  for (int i = 0; i < m - 2 * k; ++i) {
    out.Lambda(2 * k + i, 2 * k + i) = 2.0;
  }
  out.c = Vector::Zero(m);
  out.c.head(2 * k).setOnes();
  return out;
}

Dims default_dims(int k) {
  Dims d;
  d.m = 2 * k + 2;
  d.n = d.m + 8;
  return d;
}

Instance make_instance(Kind kind, int m, int n, int k, double L_f, double L_A,
                       double mu) {
  if (k < 1) throw std::invalid_argument("make_instance: k must be >= 1");
  if (!(2 * k < m && m <= n)) {
    throw std::invalid_argument("make_instance: need 2k < m <= n");
  }
  switch (kind) {
    case Kind::eco_i:
      if (!(L_f > 0.0) || !(L_A > 0.0)) {
        throw std::invalid_argument("make_instance: ECO-I needs L_f>0, L_A>0");
      }
      break;
    case Kind::spp_i:
      if (!(L_f > 0.0) || !(L_A > 0.0)) {
        throw std::invalid_argument("make_instance: SPP-I needs L_f>0, L_A>0");
      }
      break;
    case Kind::eco_ii:
    case Kind::spp_ii:
      if (!(L_f > 0.0) || L_A < 0.0 || !(L_f >= L_A)) {
        throw std::invalid_argument(
            "make_instance: hard kinds need L_f > 0 and 0 <= L_A <= L_f");
      }
      break;
    case Kind::eco_sc:
    case Kind::spp_sc:
      if (!(mu > 0.0) || !(L_A > 0.0)) {
        throw std::invalid_argument(
            "make_instance: strongly convex kinds need mu>0, L_A>0");
      }
      break;
  }

  Instance inst;
  inst.kind = kind;
  inst.m = m;
  inst.n = n;
  inst.k = k;
  inst.L_A = L_A;
  inst.mu = is_strongly_convex(kind) ? mu : 0.0;
  inst.L_f = is_strongly_convex(kind) ? mu : L_f;

  LambdaC lc = make_lambda_c(m, n, k);
  inst.A = (L_A / 2.0) * lc.Lambda;
  inst.b = (L_A / 2.0) * lc.c;

  inst.H = Matrix::Zero(n, n);
  inst.h = Vector::Zero(n);
  switch (kind) {
    case Kind::eco_i:
    case Kind::spp_i:
      // Curvature only at coordinate k and past the coupled block, so f
      // vanishes identically on the reachable spans of the early rounds.
      inst.H(k - 1, k - 1) = L_f;
      for (int i = 2 * k; i < n; ++i) inst.H(i, i) = L_f;
      break;
    case Kind::eco_ii:
    case Kind::spp_ii: {
      const Matrix B = make_B(k);
      inst.H.topLeftCorner(2 * k, 2 * k) = (L_f / 4.0) * (B.transpose() * B);
      for (int i = 2 * k; i < n; ++i) inst.H(i, i) = L_f / 4.0;
      inst.h(2 * k - 1) = L_f / 4.0 + L_A / (4.0 * kSqrt2);
      break;
    }
    case Kind::eco_sc:
    case Kind::spp_sc:
      inst.H = mu * Matrix::Identity(n, n);
      break;
  }

  inst.X_radius = kUnbounded;
  inst.Y_radius = kUnbounded;
  if (is_saddle(kind)) {
    inst.X_radius = std::sqrt(static_cast<double>(k)) * (2.0 * k + 1.0);
    switch (kind) {
      case Kind::spp_i:
        inst.Y_radius = 2.0 * L_f * std::pow(static_cast<double>(k), 1.5) / L_A;
        break;
      case Kind::spp_ii:
        inst.Y_radius = std::sqrt(static_cast<double>(k)) / 2.0;
        break;
      case Kind::spp_sc: {
        const double kk = static_cast<double>(k);
        inst.Y_radius =
            mu *
            std::sqrt(128.0 * kk * std::pow(kk + 1.0, 3) * (2.0 * kk + 1.0) /
                      15.0) /
            L_A;
        break;
      }
      default:
        break;
    }
  }
  return inst;
}

ClosedFormSolution closed_form(const Instance& inst) {
  const int k = inst.k;
  ClosedFormSolution sol;
  sol.x_star = Vector::Zero(inst.n);
  for (int i = 0; i < 2 * k; ++i) sol.x_star(i) = static_cast<double>(i + 1);
  sol.x_norm_sq = static_cast<double>(odd_square_pyramid(k));

  sol.y_star = Vector::Zero(inst.m);
  const double kk = static_cast<double>(k);
  switch (inst.kind) {
    case Kind::eco_i:
    case Kind::spp_i: {
      const double scale = 2.0 * kk * inst.L_f / inst.L_A;
      for (int i = k; i < 2 * k; ++i) sol.y_star(i) = scale;
      sol.y_norm_sq = 4.0 * inst.L_f * inst.L_f * kk * kk * kk /
                      (inst.L_A * inst.L_A);
      sol.opt_value = inst.L_f * kk * kk / 2.0;
      break;
    }
    case Kind::eco_ii:
    case Kind::spp_ii: {
      for (int i = 0; i < 2 * k; ++i) sol.y_star(i) = -1.0 / (2.0 * kSqrt2);
      sol.y_norm_sq = kk / 4.0;
      sol.opt_value = -(inst.L_f / 4.0 + inst.L_A / (2.0 * kSqrt2)) * kk;
      break;
    }
    case Kind::eco_sc:
    case Kind::spp_sc: {
      const double scale = inst.mu / inst.L_A;
      for (int i = 1; i <= 2 * k; ++i) {
        sol.y_star(i - 1) = scale * i * (4.0 * kk - i + 1.0);
      }
      sol.y_norm_sq = 2.0 * kk * (2.0 * kk + 1.0) * (4.0 * kk + 1.0) *
                      (16.0 * kk * kk + 8.0 * kk + 2.0) * inst.mu * inst.mu /
                      (15.0 * inst.L_A * inst.L_A);
      sol.opt_value = inst.mu / 2.0 * sol.x_norm_sq;
      break;
    }
  }
  return sol;
}

double kkt_residual(const Instance& inst, const Vector& x, const Vector& y) {
  if (x.size() != inst.n || y.size() != inst.m) {
    throw std::invalid_argument("kkt_residual: dimension mismatch");
  }
  const double stationarity = (inst.H * x - inst.h - inst.A.transpose() * y).norm();
  const double feasibility = (inst.A * x - inst.b).norm();
  double ball = 0.0;
  if (std::isfinite(inst.X_radius)) {
    ball += std::max(0.0, x.norm() - inst.X_radius);
  }
  if (std::isfinite(inst.Y_radius)) {
    ball += std::max(0.0, y.norm() - inst.Y_radius);
  }
  return stationarity + feasibility + ball;
}

Instance rotate_instance(const Instance& inst, const Matrix& U,
                         const Matrix& V) {
  if (U.rows() != inst.n || U.cols() != inst.n) {
    throw std::invalid_argument("rotate_instance: U must be n x n");
  }
  if (V.rows() != inst.m || V.cols() != inst.m) {
    throw std::invalid_argument("rotate_instance: V must be m x m");
  }
  const double orth_u =
      (U.transpose() * U - Matrix::Identity(inst.n, inst.n)).cwiseAbs().maxCoeff();
  const double orth_v =
      (V.transpose() * V - Matrix::Identity(inst.m, inst.m)).cwiseAbs().maxCoeff();
  if (orth_u > 1e-9 || orth_v > 1e-9) {
    throw std::invalid_argument("rotate_instance: U or V is not orthogonal");
  }
  // The disguise must not move the public data: the linear term and the right
  // hand side are part of theta, so the rotations have to fix them.
  if ((U * inst.h - inst.h).norm() > 1e-9 * (1.0 + inst.h.norm())) {
    throw std::invalid_argument("rotate_instance: U does not fix h");
  }
  if ((V * inst.b - inst.b).norm() > 1e-9 * (1.0 + inst.b.norm())) {
    throw std::invalid_argument("rotate_instance: V does not fix b");
  }
  Instance out = inst;
  Matrix Ht = U.transpose() * inst.H * U;
  out.H = 0.5 * (Ht + Ht.transpose());
  out.A = V.transpose() * inst.A * U;
  return out;
}

struct Evaluator::Impl {
  Instance inst;
  // Eigendecomposition of H, used for the unconstrained partial minimization
  // in psi on equality-constrained instances.
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  // Ball-constrained minimizer, used for psi on saddle instances.
  std::unique_ptr<BallQuadraticMinimizer> ball_qp;

  explicit Impl(Instance in) : inst(std::move(in)) {
    if (is_saddle(inst.kind)) {
      ball_qp = std::make_unique<BallQuadraticMinimizer>(inst.H);
    } else {
      eig.compute(inst.H);
      if (eig.info() != Eigen::Success) {
        throw std::runtime_error("Evaluator: eigendecomposition failed");
      }
    }
  }

  double psi(const Vector& y) const {
    const Vector g = inst.h + inst.A.transpose() * y;
    const double base = inst.b.dot(y);
    if (is_saddle(inst.kind)) {
      BallQpResult r = ball_qp->minimize(g, Vector::Zero(inst.n), inst.X_radius);
      return base + r.value;
    }
    // min over all of R^n of 1/2 x'Hx - g'x.  Finite exactly when g lies in
    // the range of H; otherwise the infimum runs off to -infinity along a
    // kernel direction.
    const Vector& lam = eig.eigenvalues();
    const Vector gt = eig.eigenvectors().transpose() * g;
    const double lam_max = std::max(lam.cwiseAbs().maxCoeff(), 1.0);
    const double cut = 1e-12 * lam_max;
    double value = 0.0;
    for (int i = 0; i < lam.size(); ++i) {
      if (lam(i) <= cut) {
        if (std::abs(gt(i)) > 1e-9 * (1.0 + g.norm())) return -kUnbounded;
      } else {
        value -= gt(i) * gt(i) / (2.0 * lam(i));
      }
    }
    return base + value;
  }
};

Evaluator::Evaluator(const Instance& inst)
    : impl_(std::make_unique<Impl>(inst)) {}
Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;

Evaluation Evaluator::operator()(const Vector& x, const Vector& y) const {
  const Instance& inst = impl_->inst;
  if (x.size() != inst.n || y.size() != inst.m) {
    throw std::invalid_argument("Evaluator: dimension mismatch");
  }
  Evaluation ev;
  ev.grad_f = inst.H * x - inst.h;
  ev.f = 0.5 * x.dot(inst.H * x) - inst.h.dot(x);
  ev.residual = inst.A * x - inst.b;
  ev.feas = ev.residual.norm();
  ev.phi = is_saddle(inst.kind) ? ev.f + inst.Y_radius * ev.feas : ev.f;
  ev.psi = impl_->psi(y);
  return ev;
}

double Evaluator::phi(const Vector& x) const {
  const Instance& inst = impl_->inst;
  if (x.size() != inst.n) throw std::invalid_argument("phi: dimension mismatch");
  const double f = 0.5 * x.dot(inst.H * x) - inst.h.dot(x);
  const double feas = (inst.A * x - inst.b).norm();
  return is_saddle(inst.kind) ? f + inst.Y_radius * feas : f;
}

double Evaluator::psi(const Vector& y) const {
  const Instance& inst = impl_->inst;
  if (y.size() != inst.m) throw std::invalid_argument("psi: dimension mismatch");
  return impl_->psi(y);
}

Evaluation evaluate(const Instance& inst, const Vector& x, const Vector& y) {
  return Evaluator(inst)(x, y);
}

namespace {

bool nearly_equal(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

void check_structure(const Instance& inst, std::vector<std::string>& out) {
  if (!(inst.k >= 1 && 2 * inst.k < inst.m && inst.m <= inst.n)) {
    out.push_back("dimensions violate 1 <= k, 2k < m <= n");
  }
  if (inst.H.rows() != inst.n || inst.H.cols() != inst.n) {
    out.push_back("H is not n x n");
    return;
  }
  if (inst.A.rows() != inst.m || inst.A.cols() != inst.n) {
    out.push_back("A is not m x n");
    return;
  }
  if (inst.h.size() != inst.n) out.push_back("h is not length n");
  if (inst.b.size() != inst.m) out.push_back("b is not length m");
  if ((inst.H - inst.H.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    out.push_back("H is not symmetric");
  }
  const double a_norm = spectral_norm(inst.A);
  if (!nearly_equal(a_norm, inst.L_A, 1e-8)) {
    std::ostringstream os;
    os << "operator norm of A is " << a_norm << ", expected " << inst.L_A;
    out.push_back(os.str());
  }
  const double h_norm = spectral_norm(inst.H);
  if (h_norm > inst.L_f * (1.0 + 1e-8) + 1e-12) {
    std::ostringstream os;
    os << "operator norm of H is " << h_norm << ", exceeds smoothness bound "
       << inst.L_f;
    out.push_back(os.str());
  }
  if (is_strongly_convex(inst.kind)) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(inst.H, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < inst.mu - 1e-9 * std::max(1.0, inst.mu)) {
      out.push_back("H is not mu-strongly convex");
    }
  }
  if (is_saddle(inst.kind)) {
    if (!std::isfinite(inst.X_radius) || !std::isfinite(inst.Y_radius)) {
      out.push_back("saddle instance must have finite radii");
    }
  } else {
    if (std::isfinite(inst.X_radius) || std::isfinite(inst.Y_radius)) {
      out.push_back("equality-constrained instance must be unconstrained");
    }
  }
}

void check_solution(const Instance& inst, const ClosedFormSolution& sol,
                    std::vector<std::string>& out) {
  if (sol.x_star.size() != inst.n || sol.y_star.size() != inst.m) {
    out.push_back("solution has wrong dimensions");
    return;
  }
  const double kkt = kkt_residual(inst, sol.x_star, sol.y_star);
  if (kkt > 1e-9) {
    std::ostringstream os;
    os << "KKT residual of solution is " << kkt;
    out.push_back(os.str());
  }
  if (!nearly_equal(sol.x_star.squaredNorm(), sol.x_norm_sq, 1e-10)) {
    out.push_back("stored |x*|^2 disagrees with x*");
  }
  if (!nearly_equal(sol.y_star.squaredNorm(), sol.y_norm_sq, 1e-10)) {
    out.push_back("stored |y*|^2 disagrees with y*");
  }
  const double f_star =
      0.5 * sol.x_star.dot(inst.H * sol.x_star) - inst.h.dot(sol.x_star);
  if (!nearly_equal(f_star, sol.opt_value, 1e-10)) {
    std::ostringstream os;
    os << "objective at x* is " << f_star << ", stored optimum is "
       << sol.opt_value;
    out.push_back(os.str());
  }
  if (std::isfinite(inst.X_radius) &&
      sol.x_star.norm() > inst.X_radius * (1.0 + 1e-12)) {
    out.push_back("x* falls outside the primal ball");
  }
  if (std::isfinite(inst.Y_radius) &&
      sol.y_star.norm() > inst.Y_radius * (1.0 + 1e-12)) {
    out.push_back("y* falls outside the dual ball");
  }
}

bool is_canonical(const Instance& inst) {
  Instance ref = make_instance(inst.kind, inst.m, inst.n, inst.k, inst.L_f,
                               inst.L_A, inst.mu);
  return (ref.H - inst.H).cwiseAbs().maxCoeff() <= 1e-9 &&
         (ref.A - inst.A).cwiseAbs().maxCoeff() <= 1e-9;
}

}  // namespace

std::vector<std::string> verify_instance(const Instance& inst) {
  std::vector<std::string> out;
  check_structure(inst, out);
  if (!out.empty()) return out;
  if (is_canonical(inst)) {
    check_solution(inst, closed_form(inst), out);
  }
  return out;
}

namespace {

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

nlohmann::json matrix_to_json(const Matrix& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Vector vector_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) {
    throw std::runtime_error(std::string("instance file: ") + what +
                             " is not an array");
  }
  Vector v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i];
  return v;
}

Matrix matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw std::runtime_error(std::string("instance file: ") + what +
                             " is not a matrix");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix M(static_cast<int>(rows), static_cast<int>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) {
      throw std::runtime_error(std::string("instance file: ") + what +
                               " has ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      M(static_cast<int>(i), static_cast<int>(c)) = j[i][c];
    }
  }
  return M;
}

nlohmann::json radius_to_json(double r) {
  if (std::isfinite(r)) return r;
  return "unbounded";
}

double radius_from_json(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "unbounded") return kUnbounded;
  return j.get<double>();
}

nlohmann::json instance_to_json(const Instance& inst,
                                const ClosedFormSolution& sol) {
  nlohmann::json j;
  j["kind"] = to_string(inst.kind);
  j["m"] = inst.m;
  j["n"] = inst.n;
  j["k"] = inst.k;
  j["L_f"] = inst.L_f;
  j["L_A"] = inst.L_A;
  j["mu"] = inst.mu;
  j["X_radius"] = radius_to_json(inst.X_radius);
  j["Y_radius"] = radius_to_json(inst.Y_radius);
  j["H"] = matrix_to_json(inst.H);
  j["h"] = vector_to_json(inst.h);
  j["A"] = matrix_to_json(inst.A);
  j["b"] = vector_to_json(inst.b);
  j["solution"] = {{"x_star", vector_to_json(sol.x_star)},
                   {"y_star", vector_to_json(sol.y_star)},
                   {"opt_value", sol.opt_value},
                   {"x_norm_sq", sol.x_norm_sq},
                   {"y_norm_sq", sol.y_norm_sq}};
  return j;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
  nlohmann::json j;
  in >> j;
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  inst.kind = kind_from_string(j.at("kind").get<std::string>());
  inst.m = j.at("m").get<int>();
  inst.n = j.at("n").get<int>();
  inst.k = j.at("k").get<int>();
  inst.L_f = j.at("L_f").get<double>();
  inst.L_A = j.at("L_A").get<double>();
  inst.mu = j.at("mu").get<double>();
  inst.X_radius = radius_from_json(j.at("X_radius"));
  inst.Y_radius = radius_from_json(j.at("Y_radius"));
  inst.H = matrix_from_json(j.at("H"), "H");
  inst.h = vector_from_json(j.at("h"), "h");
  inst.A = matrix_from_json(j.at("A"), "A");
  inst.b = vector_from_json(j.at("b"), "b");
  return inst;
}

}  // namespace

void save_instance(const Instance& inst, const ClosedFormSolution& sol,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file '" + path + "'");
  out << instance_to_json(inst, sol).dump(1) << "\n";
}

void save_instance(const Instance& inst, const std::string& path) {
  save_instance(inst, closed_form(inst), path);
}

Instance load_instance(const std::string& path) {
  return instance_from_json(load_json(path));
}

std::vector<std::string> verify_instance_file(const std::string& path) {
  std::vector<std::string> out;
  nlohmann::json j;
  Instance inst;
  try {
    j = load_json(path);
    inst = instance_from_json(j);
  } catch (const std::exception& e) {
    out.push_back(e.what());
    return out;
  }
  check_structure(inst, out);
  if (!out.empty()) return out;
  if (!j.contains("solution")) {
    out.push_back("instance file has no solution block");
    return out;
  }
  ClosedFormSolution sol;
  try {
    const nlohmann::json& s = j["solution"];
    sol.x_star = vector_from_json(s.at("x_star"), "x_star");
    sol.y_star = vector_from_json(s.at("y_star"), "y_star");
    sol.opt_value = s.at("opt_value").get<double>();
    sol.x_norm_sq = s.at("x_norm_sq").get<double>();
    sol.y_norm_sq = s.at("y_norm_sq").get<double>();
  } catch (const std::exception& e) {
    out.push_back(std::string("solution block: ") + e.what());
    return out;
  }
  check_solution(inst, sol, out);
  if (is_canonical(inst)) {
    ClosedFormSolution ref = closed_form(inst);
    if ((ref.x_star - sol.x_star).norm() > 1e-9 ||
        (ref.y_star - sol.y_star).norm() > 1e-9 * (1.0 + ref.y_star.norm())) {
      out.push_back("stored solution disagrees with the closed form");
    }
  }
  return out;
}

}  // namespace sbl::instances

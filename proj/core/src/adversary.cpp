#include <sbl/adversary.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/SVD>
#include <json.hpp>

#include <sbl/numerics.hpp>

namespace sbl::adversary {

namespace {

// Residual of the column space of M relative to S, scaled per column.
double inclusion_residual(const Matrix& M, const numerics::Subspace& S) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    const Vector col = M.col(j);
    const double scale = 1.0 + col.norm();
    worst = std::max(worst, numerics::membership_residual(S, col) / scale);
  }
  return worst;
}

Matrix polar_factor(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

void check_preconditions(const instances::Instance& inst) {
  const int k = inst.k;
  const int n = inst.n;
  const int m = inst.m;
  constexpr double tol = 1e-10;

  const numerics::Subspace K0{krylov::closed_K_basis(n, k, 0)};
  if (numerics::membership_residual(K0, inst.h) > tol * (1.0 + inst.h.norm())) {
    throw std::invalid_argument("resisting oracle: h is not in K_0");
  }
  const numerics::Subspace J0{krylov::closed_J_basis(m, k, 0)};
  if (numerics::membership_residual(J0, inst.b) > tol * (1.0 + inst.b.norm())) {
    throw std::invalid_argument("resisting oracle: b is not in J_0");
  }

  for (int s = 1; 2 * s <= k; ++s) {
    const Matrix K_prev = krylov::closed_K_basis(n, k, 2 * s - 1);
    const numerics::Subspace K_cur{krylov::closed_K_basis(n, k, 2 * s)};
    const numerics::Subspace J_cur{krylov::closed_J_basis(m, k, 2 * s)};
    if (inclusion_residual(inst.H * K_prev, K_cur) > tol) {
      throw std::invalid_argument("resisting oracle: H K_" + std::to_string(2 * s - 1) +
                                  " is not contained in K_" + std::to_string(2 * s));
    }
    if (inclusion_residual(inst.A * K_prev, J_cur) > tol) {
      throw std::invalid_argument("resisting oracle: A K_" + std::to_string(2 * s - 1) +
                                  " is not contained in J_" + std::to_string(2 * s));
    }
    if (inclusion_residual(inst.A.transpose() * krylov::closed_J_basis(m, k, 2 * s),
                           K_cur) > tol) {
      throw std::invalid_argument("resisting oracle: A'J_" + std::to_string(2 * s) +
                                  " is not contained in K_" + std::to_string(2 * s));
    }
  }
}

}  // namespace

ResistingOracle::ResistingOracle(instances::Instance base)
    : base_(std::move(base)), info_(oracle::problem_info(base_)) {
  if (base_.k < 4) {
    throw std::invalid_argument(
        "resisting oracle needs k >= 4 for a nonempty validity window, got k=" +
        std::to_string(base_.k));
  }
  check_preconditions(base_);
  max_round_index_ = (base_.k - 4) / 2;
  U_ = Matrix::Identity(base_.n, base_.n);
  V_ = Matrix::Identity(base_.m, base_.m);
}

numerics::Subspace ResistingOracle::rotated_K(const Matrix& U, int order) const {
  return numerics::Subspace{U.transpose() * krylov::closed_K_basis(base_.n, base_.k, order)};
}

numerics::Subspace ResistingOracle::rotated_J(const Matrix& V, int order) const {
  return numerics::Subspace{V.transpose() * krylov::closed_J_basis(base_.m, base_.k, order)};
}

oracle::Answer ResistingOracle::answer_with_current(const Vector& x, const Vector& y) {
  oracle::Answer a;
  const Vector Ux = U_ * x;
  const Vector Vy = V_ * y;
  a.grad_f = U_.transpose() * (base_.H * Ux) - base_.h;
  a.Ax = V_.transpose() * (base_.A * Ux);
  a.Aty = U_.transpose() * (base_.A.transpose() * Vy);
  return a;
}

oracle::Answer ResistingOracle::query(const Vector& x, const Vector& y) {
  if (finalized_) {
    throw std::logic_error("resisting oracle already finalized");
  }
  if (x.size() != base_.n || y.size() != base_.m) {
    throw std::invalid_argument("resisting oracle: query dimension mismatch");
  }
  const int s = rounds_;
  if (s > max_round_index_) {
    throw std::runtime_error(
        "resisting oracle: validity window exhausted (answered rounds 0.." +
        std::to_string(max_round_index_) + " for k=" + std::to_string(base_.k) +
        "; grow k to 2T+4 for T rounds)");
  }

  const Matrix Phi =
      numerics::subspace_fixing_rotation(rotated_K(U_, 2 * s), rotated_K(U_, 2 * s + 1), x);
  U_ = U_ * Phi;
  const Matrix Psi =
      numerics::subspace_fixing_rotation(rotated_J(V_, 2 * s), rotated_J(V_, 2 * s + 1), y);
  V_ = V_ * Psi;
  if (++compositions_ % 10 == 0) {
    U_ = polar_factor(U_);
    V_ = polar_factor(V_);
  }

  const double res_x = numerics::membership_residual(rotated_K(U_, 2 * s + 1), x);
  const double res_y = numerics::membership_residual(rotated_J(V_, 2 * s + 1), y);
  membership_residuals_.push_back(std::max(res_x, res_y));

  oracle::Answer a = answer_with_current(x, y);
  oracle::TranscriptEntry entry;
  entry.query_index = static_cast<int>(transcript_.entries.size());
  entry.x = x;
  entry.y = y;
  entry.grad_f = a.grad_f;
  entry.Ax = a.Ax;
  entry.Aty = a.Aty;
  transcript_.entries.push_back(std::move(entry));
  ++rounds_;
  return a;
}

ResistingOracle::FinalizeResult ResistingOracle::finalize(const Vector& xbar,
                                                          const Vector& ybar,
                                                          const std::string& method) {
  if (finalized_) {
    throw std::logic_error("resisting oracle already finalized");
  }
  if (xbar.size() != base_.n || ybar.size() != base_.m) {
    throw std::invalid_argument("resisting oracle: output dimension mismatch");
  }
  // The finalize rotation is one more steering step at s = rounds_: it fixes
  // everything past answers depend on (K_{2s}) and drops the output into
  // K_{2s+1}, which by the round budget still sits inside K_{k-1}.
  const int s = rounds_;
  const Matrix Phi =
      numerics::subspace_fixing_rotation(rotated_K(U_, 2 * s), rotated_K(U_, 2 * s + 1), xbar);
  U_ = U_ * Phi;
  const Matrix Psi =
      numerics::subspace_fixing_rotation(rotated_J(V_, 2 * s), rotated_J(V_, 2 * s + 1), ybar);
  V_ = V_ * Psi;
  finalized_ = true;

  FinalizeResult out;
  out.U = U_;
  out.V = V_;
  out.final_instance = instances::rotate_instance(base_, U_, V_);

  Certificate cert;
  cert.method = method;
  cert.base_kind = base_.kind;
  cert.k = base_.k;
  cert.rounds = rounds_;
  cert.membership_residuals = membership_residuals_;
  cert.final_membership_residual =
      std::max(numerics::membership_residual(rotated_K(U_, 2 * s + 1), xbar),
               numerics::membership_residual(rotated_J(V_, 2 * s + 1), ybar));

  const auto sol = instances::closed_form(base_);
  const Vector x_star_rot = U_.transpose() * sol.x_star;
  const instances::Evaluator ev(out.final_instance);
  const auto e = ev(xbar, ybar);

  cert.pass = true;
  for (const krylov::Quantity q : certified_quantities(base_.kind)) {
    double certified = krylov::min_over_K(base_, q);
    double measured = 0.0;
    std::string name = krylov::to_string(q);
    switch (q) {
      case krylov::Quantity::obj_abs:
        measured = std::abs(e.f - sol.opt_value);
        break;
      case krylov::Quantity::obj:
        // min_over_K(obj) is the bare minimum of f; the certified bound is on
        // the objective gap.
        certified -= sol.opt_value;
        measured = e.f - sol.opt_value;
        name = "obj_gap";
        break;
      case krylov::Quantity::feas:
        measured = e.feas;
        break;
      case krylov::Quantity::dist2:
        measured = (xbar - x_star_rot).squaredNorm();
        break;
      case krylov::Quantity::phi_gap:
        measured = e.phi - sol.opt_value;
        break;
    }
    const double slack = measured - certified;
    cert.quantities.push_back(name);
    cert.certified_lower_values.push_back(certified);
    cert.measured_values.push_back(measured);
    cert.slacks.push_back(slack);
    if (slack < -1e-7 * std::max(1.0, std::abs(certified))) cert.pass = false;
  }
  out.certificate = std::move(cert);
  return out;
}

ReplayVerdict replay_consistency(const oracle::Transcript& transcript,
                                 const instances::Instance& final_instance) {
  ReplayVerdict v;
  for (const auto& entry : transcript.entries) {
    const Vector grad = final_instance.H * entry.x - final_instance.h;
    const Vector Ax = final_instance.A * entry.x;
    const Vector Aty = final_instance.A.transpose() * entry.y;
    v.max_deviation = std::max(
        v.max_deviation,
        std::max({(grad - entry.grad_f).lpNorm<Eigen::Infinity>(),
                  (Ax - entry.Ax).lpNorm<Eigen::Infinity>(),
                  (Aty - entry.Aty).lpNorm<Eigen::Infinity>()}));
  }
  v.pass = v.max_deviation <= 1e-8;
  return v;
}

std::vector<krylov::Quantity> certified_quantities(instances::Kind kind) {
  using instances::Kind;
  using krylov::Quantity;
  switch (kind) {
    case Kind::eco_i: return {Quantity::obj_abs, Quantity::feas};
    case Kind::eco_ii: return {Quantity::obj, Quantity::feas};
    case Kind::eco_sc: return {Quantity::dist2, Quantity::feas};
    case Kind::spp_i: return {Quantity::phi_gap};
    case Kind::spp_ii: return {Quantity::phi_gap};
    case Kind::spp_sc: return {Quantity::dist2, Quantity::phi_gap};
  }
  throw std::invalid_argument("unknown kind");
}

void save_certificate(const Certificate& cert, const std::string& path) {
  nlohmann::json j;
  j["method"] = cert.method;
  j["base_kind"] = instances::to_string(cert.base_kind);
  j["k"] = cert.k;
  j["rounds"] = cert.rounds;
  j["membership_residuals"] = cert.membership_residuals;
  j["final_membership_residual"] = cert.final_membership_residual;
  j["quantities"] = cert.quantities;
  j["certified_lower_values"] = cert.certified_lower_values;
  j["measured_values"] = cert.measured_values;
  j["slacks"] = cert.slacks;
  j["pass"] = cert.pass;
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << j.dump(1) << '\n';
}

}  // namespace sbl::adversary

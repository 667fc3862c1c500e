#include <sbl/harness.hpp>

#include <cmath>
#include <stdexcept>

#include <sbl/bounds.hpp>

namespace sbl::harness {

namespace {

// Metrics against the rotated instance.  solvers::metrics() would recompute
// the canonical closed form, which is wrong after a change of variables; here
// the optimizer is carried over from the finalize step instead.
void fill_metrics_rotated(solvers::Trajectory& traj,
                          const instances::Instance& final_inst,
                          const Vector& x_star, double opt_value) {
  instances::Evaluator eval(final_inst);
  const bool saddle = instances::is_saddle(final_inst.kind);
  for (auto& p : traj.points) {
    const instances::Evaluation e = eval(p.x, p.y);
    p.obj_signed = e.f - opt_value;
    p.obj_err = std::abs(p.obj_signed);
    p.feas = e.feas;
    p.dist2 = (p.x - x_star).squaredNorm();
    if (saddle) p.gap = e.phi - e.psi;
  }
}

}  // namespace

instances::Kind default_kind_for(const std::string& method) {
  using instances::Kind;
  if (method == "lalm") return Kind::eco_i;
  if (method == "probe") return Kind::eco_ii;
  if (method == "agd") return Kind::eco_ii;
  if (method == "penalty_agd") return Kind::eco_sc;
  if (method == "smoothing") return Kind::spp_ii;
  if (method == "pdhg") return Kind::spp_sc;
  throw std::invalid_argument("unknown method '" + method + "'");
}

AdversarialRun run_adversarial(const AdversarialConfig& cfg) {
  if (cfg.T < 1) throw std::invalid_argument("adversarial run needs T >= 1");
  const int k = 2 * cfg.T + 4;
  const auto [m_def, n_def] = instances::default_dims(k);
  const int m = cfg.m > 0 ? cfg.m : m_def;
  const int n = cfg.n > 0 ? cfg.n : n_def;

  AdversarialRun out;
  out.base = instances::make_instance(cfg.kind, m, n, k, cfg.L_f, cfg.L_A, cfg.mu);
  adversary::ResistingOracle oracle(out.base);

  const int rounds = cfg.T + 1;  // oracle answers rounds 0..T
  if (cfg.method == "lalm") {
    // 2 calls per iteration plus the trailing residual read: 2*iters + 1.
    const int iters = (rounds - 1) / 2;
    if (iters < 1) throw std::invalid_argument("lalm needs T >= 2");
    out.trajectory = solvers::run_lalm(oracle, solvers::lalm_eta_auto(out.base), iters);
  } else if (cfg.method == "probe") {
    out.trajectory = solvers::run_probe(oracle, rounds, cfg.seed);
  } else if (cfg.method == "agd") {
    out.trajectory = solvers::run_agd(oracle, rounds);
  } else if (cfg.method == "penalty_agd") {
    const auto pp = solvers::penalty_params_for(out.base, cfg.eps);
    out.trajectory = solvers::run_penalty_agd(oracle, pp.rho0, pp.eps0, rounds);
  } else if (cfg.method == "smoothing") {
    out.trajectory = solvers::run_smoothing(oracle, rounds / 2);
  } else if (cfg.method == "pdhg") {
    const double step = 1.0 / out.base.L_A;
    out.trajectory = solvers::run_pdhg(oracle, step, step, rounds / 2);
  } else {
    throw std::invalid_argument("unknown method '" + cfg.method + "'");
  }

  if (out.trajectory.points.empty())
    throw std::logic_error("method produced no trajectory points");
  const auto& last = out.trajectory.points.back();
  auto fin = oracle.finalize(last.x, last.y, cfg.method);
  out.final_instance = std::move(fin.final_instance);
  out.U = std::move(fin.U);
  out.V = std::move(fin.V);
  out.certificate = std::move(fin.certificate);
  out.replay = adversary::replay_consistency(oracle.transcript(), out.final_instance);
  out.oracle_calls = static_cast<int>(oracle.transcript().call_count());

  const auto sol = instances::closed_form(out.base);
  fill_metrics_rotated(out.trajectory, out.final_instance,
                       out.U.transpose() * sol.x_star, sol.opt_value);
  return out;
}

}  // namespace sbl::harness

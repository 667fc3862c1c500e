#include <sbl/solvers.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include <sbl/numerics.hpp>

namespace sbl::solvers {

namespace {

using numerics::project_ball;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require_eco(const oracle::ProblemInfo& info, const char* who) {
  if (instances::is_saddle(info.kind)) {
    throw std::invalid_argument(std::string(who) +
                                " requires an equality-constrained kind, got " +
                                instances::to_string(info.kind));
  }
}

void require_saddle(const oracle::ProblemInfo& info, const char* who) {
  if (!instances::is_saddle(info.kind)) {
    throw std::invalid_argument(std::string(who) +
                                " requires a saddle-point kind, got " +
                                instances::to_string(info.kind));
  }
}

void require_iters(int T, const char* who) {
  if (T < 1) {
    throw std::invalid_argument(std::string(who) + ": iteration count must be >= 1, got " +
                                std::to_string(T));
  }
}

TrajectoryPoint make_point(int t, Vector x, Vector y, long long calls) {
  TrajectoryPoint p;
  p.t = t;
  p.x = std::move(x);
  p.y = std::move(y);
  p.oracle_calls = calls;
  return p;
}

}  // namespace

Trajectory run_lalm(oracle::FirstOrderOracle& o, double eta, int T) {
  const auto& info = o.info();
  require_eco(info, "run_lalm");
  require_iters(T, "run_lalm");
  if (eta <= 0.0) {
    throw std::invalid_argument("run_lalm: eta must be positive, got " + format_double(eta));
  }

  Trajectory traj;
  traj.solver_id = "lalm";
  traj.params = "eta=" + format_double(eta) + ",T=" + std::to_string(T);
  traj.linear_span = !std::isfinite(info.X_radius);

  const Vector zero_y = Vector::Zero(info.m);
  Vector x = Vector::Zero(info.n);
  Vector lam = Vector::Zero(info.m);   // lam^t = sum_{j=1}^t r^(j)
  Vector P = Vector::Zero(info.n);     // A' lam^t
  Vector avg = Vector::Zero(info.n);   // average of x^(1..t)
  traj.raw_x.push_back(x);

  for (int t = 0; t < T; ++t) {
    const auto a1 = o.query(x, zero_y);
    const Vector r = a1.Ax - info.b;
    if (t >= 1) {
      lam += r;
      traj.points.push_back(make_point(t, avg, lam, 2LL * t + 1));
    }
    const auto a2 = o.query(x, r);
    if (t >= 1) P += a2.Aty;
    const Vector step = a1.grad_f + P + a2.Aty;
    x = project_ball(x - step / eta, info.X_radius);
    traj.raw_x.push_back(x);
    avg = (avg * t + x) / (t + 1);
  }
  // One more residual read to pair the final averaged iterate with lam^T.
  const auto last = o.query(x, zero_y);
  lam += last.Ax - info.b;
  traj.points.push_back(make_point(T, avg, lam, 2LL * T + 1));
  return traj;
}

Trajectory run_pdhg(oracle::FirstOrderOracle& o, double tau, double sigma, int T) {
  const auto& info = o.info();
  require_saddle(info, "run_pdhg");
  require_iters(T, "run_pdhg");
  if (tau <= 0.0 || sigma <= 0.0 ||
      tau * sigma * info.L_A * info.L_A > 1.0 + 1e-12) {
    throw std::invalid_argument(
        "run_pdhg: stepsizes violate tau*sigma*||A||^2 <= 1 (tau=" + format_double(tau) +
        ", sigma=" + format_double(sigma) + ", ||A||=" + format_double(info.L_A) + ")");
  }

  Trajectory traj;
  traj.solver_id = "pdhg";
  traj.params = "tau=" + format_double(tau) + ",sigma=" + format_double(sigma) +
                ",T=" + std::to_string(T);

  const Vector zero_y = Vector::Zero(info.m);
  Vector x = Vector::Zero(info.n);
  Vector y = Vector::Zero(info.m);
  Vector xavg = Vector::Zero(info.n);
  Vector yavg = Vector::Zero(info.m);
  traj.raw_x.push_back(x);
  traj.raw_y.push_back(y);

  for (int t = 0; t < T; ++t) {
    // dual ascent direction is b - Ax, matching the multiplier orientation of
    // kkt_residual and Evaluator::psi, so the averaged pair drives the
    // reported gap to zero
    const auto a1 = o.query(x, y);
    const Vector xn = project_ball(x - tau * (a1.grad_f - a1.Aty), info.X_radius);
    const auto a2 = o.query(2.0 * xn - x, zero_y);
    y = project_ball(y + sigma * (info.b - a2.Ax), info.Y_radius);
    x = xn;
    traj.raw_x.push_back(x);
    traj.raw_y.push_back(y);
    xavg = (xavg * t + x) / (t + 1);
    yavg = (yavg * t + y) / (t + 1);
    traj.points.push_back(make_point(t + 1, xavg, yavg, 2LL * (t + 1)));
  }
  return traj;
}

Trajectory run_smoothing(oracle::FirstOrderOracle& o, int T) {
  const auto& info = o.info();
  require_saddle(info, "run_smoothing");
  require_iters(T, "run_smoothing");
  if (info.L_A <= 0.0) {
    throw std::invalid_argument("run_smoothing needs ||A|| > 0");
  }

  const double mu_s = 2.0 * info.L_A * info.X_radius / ((T + 1.0) * info.Y_radius);
  const double L = info.L_f + info.L_A * info.L_A / mu_s;

  Trajectory traj;
  traj.solver_id = "smoothing";
  traj.params = "T=" + std::to_string(T) + ",mu_s=" + format_double(mu_s);

  const Vector zero_x = Vector::Zero(info.n);
  const Vector zero_y = Vector::Zero(info.m);
  Vector x = Vector::Zero(info.n);
  Vector z = x;
  double theta = 1.0;
  Vector y_sum = Vector::Zero(info.m);
  double w_sum = 0.0;
  traj.raw_x.push_back(x);

  for (int t = 1; t <= T; ++t) {
    const auto a1 = o.query(z, zero_y);
    const Vector y_s = project_ball((info.b - a1.Ax) / mu_s, info.Y_radius);
    const auto a2 = o.query(zero_x, y_s);
    const Vector grad = a1.grad_f - a2.Aty;
    const Vector xn = project_ball(z - grad / L, info.X_radius);
    const double theta_next = (1.0 + std::sqrt(1.0 + 4.0 * theta * theta)) / 2.0;
    z = xn + ((theta - 1.0) / theta_next) * (xn - x);
    x = xn;
    theta = theta_next;
    const double w = t + 1.0;
    w_sum += w;
    y_sum += w * y_s;
    traj.raw_x.push_back(x);
    traj.raw_y.push_back(y_s);
    traj.points.push_back(make_point(t, x, y_sum / w_sum, 2LL * t));
  }
  return traj;
}

Trajectory run_agd(oracle::FirstOrderOracle& o, int T) {
  const auto& info = o.info();
  require_iters(T, "run_agd");
  if (info.L_f <= 0.0) {
    throw std::invalid_argument("run_agd needs L_f > 0");
  }

  Trajectory traj;
  traj.solver_id = "agd";
  traj.params = "T=" + std::to_string(T);

  const Vector zero_y = Vector::Zero(info.m);
  Vector x = Vector::Zero(info.n);
  Vector z = x;
  double theta = 1.0;
  traj.raw_x.push_back(x);

  for (int t = 1; t <= T; ++t) {
    const auto a = o.query(z, zero_y);
    const Vector xn = project_ball(z - a.grad_f / info.L_f, info.X_radius);
    const double theta_next = (1.0 + std::sqrt(1.0 + 4.0 * theta * theta)) / 2.0;
    z = xn + ((theta - 1.0) / theta_next) * (xn - x);
    x = xn;
    theta = theta_next;
    traj.raw_x.push_back(x);
    traj.points.push_back(make_point(t, x, zero_y, t));
  }
  return traj;
}

Trajectory run_penalty_agd(oracle::FirstOrderOracle& o, double rho0, double eps0,
                           long long max_calls) {
  const auto& info = o.info();
  if (info.kind != instances::Kind::eco_sc) {
    throw std::invalid_argument(
        "run_penalty_agd requires the strongly convex equality-constrained kind, got " +
        std::string(instances::to_string(info.kind)));
  }
  if (rho0 <= 0.0 || eps0 <= 0.0) {
    throw std::invalid_argument("run_penalty_agd: rho0 and eps0 must be positive");
  }

  const double mu = info.mu;
  const double L = info.L_f + rho0 * info.L_A * info.L_A;
  const double beta = (std::sqrt(L) - std::sqrt(mu)) / (std::sqrt(L) + std::sqrt(mu));

  Trajectory traj;
  traj.solver_id = "penalty_agd";
  traj.params = "rho0=" + format_double(rho0) + ",eps0=" + format_double(eps0);

  const Vector zero_y = Vector::Zero(info.m);
  Vector x = Vector::Zero(info.n);
  Vector z = x;
  traj.raw_x.push_back(x);

  long long calls = 0;
  long long iter = 0;
  long long next_log = 1;
  constexpr long long kHardCap = 50'000'000;
  bool converged = false;

  while (!converged) {
    if (max_calls > 0 && calls + 2 > max_calls) break;
    const auto a1 = o.query(z, zero_y);
    const Vector r = a1.Ax - info.b;
    const auto a2 = o.query(z, r);
    calls += 2;
    const Vector g = a1.grad_f + rho0 * a2.Aty;
    ++iter;
    // Strong convexity squeezes the penalized gap below ||grad||^2/(2 mu);
    // one more gradient step from a passing z only improves it.
    converged = g.squaredNorm() / (2.0 * mu) <= eps0;
    const Vector xn = project_ball(z - g / L, info.X_radius);
    z = xn + beta * (xn - x);
    x = xn;
    traj.raw_x.push_back(x);
    if (converged || iter == next_log) {
      traj.points.push_back(make_point(static_cast<int>(iter), x, zero_y, calls));
      if (iter == next_log) next_log *= 2;
    }
    if (iter >= kHardCap) {
      throw std::runtime_error("run_penalty_agd: no convergence within " +
                               std::to_string(kHardCap) + " iterations");
    }
  }
  if (traj.points.empty() || traj.points.back().t != iter) {
    traj.points.push_back(make_point(static_cast<int>(iter), x, zero_y, calls));
  }
  return traj;
}

Trajectory run_probe(oracle::FirstOrderOracle& o, int rounds, std::uint64_t seed) {
  const auto& info = o.info();
  require_iters(rounds, "run_probe");

  Trajectory traj;
  traj.solver_id = "probe";
  traj.params = "rounds=" + std::to_string(rounds) + ",seed=" + std::to_string(seed);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Vector> x_gens;  // h plus every grad_f / A'y answer
  std::vector<Vector> y_gens;  // b plus every Ax answer
  x_gens.push_back(info.h);
  y_gens.push_back(info.b);

  // Keeps unconstrained runs numerically tame without using private data.
  const double cap = 100.0 * (1.0 + info.h.norm() + info.b.norm());

  Vector x = Vector::Zero(info.n);
  Vector y = Vector::Zero(info.m);
  traj.raw_x.push_back(x);
  traj.raw_y.push_back(y);

  for (int s = 0; s < rounds; ++s) {
    const auto a = o.query(x, y);
    x_gens.push_back(a.grad_f);
    x_gens.push_back(a.Aty);
    y_gens.push_back(a.Ax);

    Vector xn = Vector::Zero(info.n);
    for (const auto& g : x_gens) xn += gauss(rng) * g;
    Vector yn = Vector::Zero(info.m);
    for (const auto& g : y_gens) yn += gauss(rng) * g;
    xn = project_ball(xn, std::isfinite(info.X_radius) ? info.X_radius : cap);
    yn = project_ball(yn, std::isfinite(info.Y_radius) ? info.Y_radius : cap);

    x = xn;
    y = yn;
    traj.raw_x.push_back(x);
    traj.raw_y.push_back(y);
    traj.points.push_back(make_point(s + 1, x, y, s + 1));
  }
  return traj;
}

void metrics(Trajectory& traj, const instances::Instance& inst) {
  const auto sol = instances::closed_form(inst);
  const instances::Evaluator ev(inst);
  const bool saddle = instances::is_saddle(inst.kind);
  const Vector zero_y = Vector::Zero(inst.m);
  for (auto& p : traj.points) {
    const Vector& y = p.y.size() == inst.m ? p.y : zero_y;
    const auto e = ev(p.x, y);
    p.obj_signed = e.f - sol.opt_value;
    p.obj_err = std::abs(p.obj_signed);
    p.feas = e.feas;
    p.dist2 = (p.x - sol.x_star).squaredNorm();
    if (saddle) p.gap = e.phi - e.psi;
  }
}

namespace {

Trajectory with_metrics(Trajectory traj, const instances::Instance& inst) {
  metrics(traj, inst);
  return traj;
}

}  // namespace

Trajectory run_lalm(const instances::Instance& inst, double eta, int T) {
  oracle::InstanceOracle o(inst);
  return with_metrics(run_lalm(o, eta, T), inst);
}

Trajectory run_pdhg(const instances::Instance& inst, double tau, double sigma, int T) {
  oracle::InstanceOracle o(inst);
  return with_metrics(run_pdhg(o, tau, sigma, T), inst);
}

Trajectory run_pdhg(const instances::Instance& inst, int T) {
  if (inst.L_A <= 0.0) {
    throw std::invalid_argument("run_pdhg: default stepsize 1/||A|| needs ||A|| > 0");
  }
  const double s = 1.0 / inst.L_A;
  return run_pdhg(inst, s, s, T);
}

Trajectory run_smoothing(const instances::Instance& inst, int T) {
  oracle::InstanceOracle o(inst);
  return with_metrics(run_smoothing(o, T), inst);
}

Trajectory run_agd(const instances::Instance& inst, int T) {
  oracle::InstanceOracle o(inst);
  return with_metrics(run_agd(o, T), inst);
}

Trajectory run_penalty_agd(const instances::Instance& inst, double rho0, double eps0) {
  oracle::InstanceOracle o(inst);
  return with_metrics(run_penalty_agd(o, rho0, eps0), inst);
}

Trajectory run_probe(const instances::Instance& inst, int rounds, std::uint64_t seed) {
  oracle::InstanceOracle o(inst);
  return with_metrics(run_probe(o, rounds, seed), inst);
}

double lalm_eta_auto(const instances::Instance& inst) {
  return bounds::lalm_eta_auto(bounds::params_for(inst));
}

PenaltyParams penalty_params_for(const instances::Instance& inst, double eps) {
  if (inst.kind != instances::Kind::eco_sc) {
    throw std::invalid_argument(
        "penalty_params_for requires the strongly convex equality-constrained kind");
  }
  if (eps <= 0.0) {
    throw std::invalid_argument("penalty_params_for needs eps > 0");
  }
  const auto sol = instances::closed_form(inst);
  return PenaltyParams{2.0 * sol.y_norm_sq / (inst.mu * eps), inst.mu * eps / 4.0};
}

namespace {

void write_envelope_cell(std::ostream& out, const std::optional<bounds::BoundEnvelope>& env,
                         int t) {
  if (!env) return;
  const auto w = bounds::validity_window(env->source, env->params.m);
  if (t < w.first || t > w.last) return;
  out << format_double((*env)(t).front().value);
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::optional<bounds::BoundEnvelope>& lower,
                          const std::optional<bounds::BoundEnvelope>& upper) {
  out << "t,oracle_calls,obj_err,obj_signed,feas,dist2,gap,lower_env,upper_env\n";
  for (const auto& p : traj.points) {
    out << p.t << ',' << p.oracle_calls << ',' << format_double(p.obj_err) << ','
        << format_double(p.obj_signed) << ',' << format_double(p.feas) << ','
        << format_double(p.dist2) << ',' << format_double(p.gap) << ',';
    write_envelope_cell(out, lower, p.t);
    out << ',';
    write_envelope_cell(out, upper, p.t);
    out << '\n';
  }
}

void save_trajectory_csv(const std::string& path, const Trajectory& traj,
                         const std::optional<bounds::BoundEnvelope>& lower,
                         const std::optional<bounds::BoundEnvelope>& upper) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  write_trajectory_csv(out, traj, lower, upper);
}

}  // namespace sbl::solvers

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <sbl/bounds.hpp>
#include <sbl/instances.hpp>
#include <sbl/oracle.hpp>
#include <sbl/types.hpp>

namespace sbl::solvers {

struct TrajectoryPoint {
  int t = 0;
  Vector x;
  Vector y;
  long long oracle_calls = 0;
  // Filled by metrics(); NaN until then, and NaN for measures that do not
  // apply to the instance kind (gap on equality-constrained kinds).
  double obj_err = std::numeric_limits<double>::quiet_NaN();
  double obj_signed = std::numeric_limits<double>::quiet_NaN();
  double feas = std::numeric_limits<double>::quiet_NaN();
  double dist2 = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::string solver_id;
  std::string params;
  // True when the runner provably keeps its query iterates inside the span
  // of past oracle answers (LALM on an unconstrained domain).  Lower bounds
  // on fixed instances are asserted only for such runs.
  bool linear_span = false;
  std::vector<TrajectoryPoint> points;  // official outputs (averaged where the
                                        // method's guarantee is on averages)
  // Method iterates x^(0), x^(1), ... before any averaging, in the form
  // check_linear_span expects (raw_x[0] = 0).
  std::vector<Vector> raw_x;
  std::vector<Vector> raw_y;
};

// Linearized augmented Lagrangian method on an equality-constrained instance:
//   x^{t+1} = Proj_X(x^t - (1/eta)(grad f(x^t) + A'(lam^t + r^t))),
//   lam^{t+1} = lam^t + r^{t+1},  r = Ax - b.
// Two oracle calls per iteration plus one final call to read r^T; the
// reported x is the running average of x^(1..t) (that is what the O(1/t)
// guarantee covers), raw iterates are kept alongside.
Trajectory run_lalm(oracle::FirstOrderOracle& o, double eta, int T);

// Primal-dual hybrid gradient with extrapolation parameter 1 on a
// saddle-point instance; averaged iterates reported.  Requires
// tau*sigma*||A||^2 <= 1.
Trajectory run_pdhg(oracle::FirstOrderOracle& o, double tau, double sigma, int T);

// Smoothing scheme: replaces max_{||y||<=R_Y} <b-Ax, y> by its Moreau
// smoothing with level mu_s = 2 ||A|| R_X / ((T+1) R_Y) chosen from the
// pre-specified budget T, then runs accelerated projected gradient on the X
// ball.  Dual output is the (t+1)-weighted average of the smoothed-argmax
// points.
Trajectory run_smoothing(oracle::FirstOrderOracle& o, int T);

// Accelerated (projected) gradient on f alone, ignoring the coupling term;
// one oracle call per iteration.
Trajectory run_agd(oracle::FirstOrderOracle& o, int T);

// Quadratic-penalty method for the strongly convex equality-constrained
// kind: accelerated gradient with constant momentum on
//   F(x) = f(x) + (rho0/2)||Ax - b||^2
// until ||grad F||^2 / (2 mu) <= eps0.  max_calls = 0 means no cap.
Trajectory run_penalty_agd(oracle::FirstOrderOracle& o, double rho0, double eps0,
                           long long max_calls = 0);

// Seeded random method: each query point is a random combination of all past
// oracle answers (plus h and b), ball-projected when the domain is bounded.
// Useful as a "generic method" driver against the resisting oracle.
Trajectory run_probe(oracle::FirstOrderOracle& o, int rounds, std::uint64_t seed);

// Convenience wrappers: run against a plain instance oracle and fill metrics.
Trajectory run_lalm(const instances::Instance& inst, double eta, int T);
Trajectory run_pdhg(const instances::Instance& inst, double tau, double sigma, int T);
Trajectory run_pdhg(const instances::Instance& inst, int T);  // tau = sigma = 1/||A||
Trajectory run_smoothing(const instances::Instance& inst, int T);
Trajectory run_agd(const instances::Instance& inst, int T);
Trajectory run_penalty_agd(const instances::Instance& inst, double rho0, double eps0);
Trajectory run_probe(const instances::Instance& inst, int rounds, std::uint64_t seed);

// Stepsize eta = L_f + beta ||A||^2 with the penalty parameter beta behind
// the O(1/t) ALM guarantee; reads ||x*||, ||y*|| from the closed form.
double lalm_eta_auto(const instances::Instance& inst);

// rho0 = 2||y*||^2/(mu eps), eps0 = mu eps / 4: the parameter choice that
// turns the penalty method's guarantee into ||x - x*||^2 <= eps.
struct PenaltyParams {
  double rho0;
  double eps0;
};
PenaltyParams penalty_params_for(const instances::Instance& inst, double eps);

// Fill obj_err/obj_signed/feas/dist2 (and gap for saddle kinds) on every
// point from the instance's closed form.
void metrics(Trajectory& traj, const instances::Instance& inst);

// CSV: t,oracle_calls,obj_err,obj_signed,feas,dist2,gap,lower_env,upper_env.
// Envelope columns hold the envelope's leading metric at each in-window t and
// stay empty otherwise.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::optional<bounds::BoundEnvelope>& lower = {},
                          const std::optional<bounds::BoundEnvelope>& upper = {});
void save_trajectory_csv(const std::string& path, const Trajectory& traj,
                         const std::optional<bounds::BoundEnvelope>& lower = {},
                         const std::optional<bounds::BoundEnvelope>& upper = {});

}  // namespace sbl::solvers

#include <sbl/cli.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include <sbl/adversary.hpp>
#include <sbl/bounds.hpp>
#include <sbl/harness.hpp>
#include <sbl/instances.hpp>
#include <sbl/krylov.hpp>
#include <sbl/numerics.hpp>
#include <sbl/oracle.hpp>
#include <sbl/solvers.hpp>

namespace fs = std::filesystem;

namespace sbl::cli {

namespace {

// invalid_argument / domain_error mean the request was bad (exit 2); anything
// else that escapes is a failed check or an internal inconsistency (exit 1).
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int resolve_k(const InstanceSpec& spec) {
  if (spec.k > 0) return spec.k;
  if (spec.T >= 1) return 2 * spec.T + 4;
  throw std::invalid_argument("need --k >= 1 (or --T >= 1, which sets k = 2T + 4)");
}

instances::Instance build_instance(const InstanceSpec& spec) {
  if (!spec.file.empty()) return instances::load_instance(spec.file);
  const int k = resolve_k(spec);
  const auto dims = instances::default_dims(k);
  const int m = spec.m > 0 ? spec.m : dims.m;
  const int n = spec.n > 0 ? spec.n : dims.n;
  return instances::make_instance(instances::kind_from_string(spec.kind), m, n, k,
                                  spec.L_f, spec.L_A, spec.mu);
}

bounds::Source lower_source_for(instances::Kind kind) {
  using instances::Kind;
  switch (kind) {
    case Kind::eco_i: return bounds::Source::span_i;
    case Kind::eco_ii: return bounds::Source::span_ii;
    case Kind::eco_sc: return bounds::Source::span_sc;
    case Kind::spp_i: return bounds::Source::saddle_i_remark;
    case Kind::spp_ii: return bounds::Source::saddle_ii;
    case Kind::spp_sc: return bounds::Source::saddle_sc;
  }
  throw std::logic_error("unreachable kind");
}

std::optional<bounds::BoundEnvelope> upper_for(const std::string& solver,
                                               const bounds::EnvelopeParams& params) {
  if (solver == "lalm") return bounds::make_envelope(bounds::Source::upper_alm, params);
  if (solver == "smoothing")
    return bounds::make_envelope(bounds::Source::upper_smoothing, params);
  return std::nullopt;
}

solvers::Trajectory dispatch_fixed(const std::string& solver,
                                   const instances::Instance& inst,
                                   const RunOptions& opt, std::uint64_t seed) {
  const int iters = opt.iters > 0 ? opt.iters : inst.k;
  if (solver == "lalm") {
    double eta;
    if (opt.eta == "auto") {
      eta = solvers::lalm_eta_auto(inst);
    } else {
      try {
        eta = std::stod(opt.eta);
      } catch (const std::exception&) {
        throw std::invalid_argument("--eta must be 'auto' or a positive number, got '" +
                                    opt.eta + "'");
      }
    }
    return solvers::run_lalm(inst, eta, iters);
  }
  if (solver == "pdhg") {
    if (opt.tau == 0.0 && opt.sigma == 0.0) return solvers::run_pdhg(inst, iters);
    return solvers::run_pdhg(inst, opt.tau, opt.sigma, iters);
  }
  if (solver == "smoothing") return solvers::run_smoothing(inst, iters);
  if (solver == "agd") return solvers::run_agd(inst, iters);
  if (solver == "penalty_agd") {
    const auto pp = solvers::penalty_params_for(inst, opt.eps);
    return solvers::run_penalty_agd(inst, pp.rho0, pp.eps0);
  }
  if (solver == "probe") return solvers::run_probe(inst, iters, seed);
  throw std::invalid_argument("unknown solver '" + solver + "'");
}

std::string normalized_solver(std::string name) {
  for (char& c : name)
    if (c == '-') c = '_';
  return name;
}

int run_adversarial(const RunOptions& opt, std::uint64_t seed) {
  if (!opt.spec.file.empty())
    throw std::invalid_argument(
        "--adversarial synthesizes its own instance; --instance cannot be combined "
        "with it");
  if (opt.spec.T < 1)
    throw std::invalid_argument("--adversarial needs --T >= 1 (the round budget)");
  bool all_pass = true;
  for (const auto& raw : opt.solvers) {
    harness::AdversarialConfig cfg;
    cfg.method = normalized_solver(raw);
    cfg.kind = instances::kind_from_string(opt.spec.kind);
    cfg.T = opt.spec.T;
    cfg.m = opt.spec.m;
    cfg.n = opt.spec.n;
    cfg.L_f = opt.spec.L_f;
    cfg.L_A = opt.spec.L_A;
    cfg.mu = opt.spec.mu;
    cfg.eps = opt.eps;
    cfg.seed = seed;
    const auto run = harness::run_adversarial(cfg);

    const fs::path dir(opt.outdir);
    solvers::save_trajectory_csv((dir / (cfg.method + "_adv_trajectory.csv")).string(),
                                 run.trajectory);
    adversary::save_certificate(run.certificate,
                                (dir / (cfg.method + "_certificate.json")).string());

    const bool ok = run.certificate.pass && run.replay.pass;
    all_pass = all_pass && ok;
    std::printf("%-12s vs %-6s  rounds=%-3d calls=%-3d certificate=%s replay=%s\n",
                cfg.method.c_str(), to_string(cfg.kind).c_str(), run.certificate.rounds,
                run.oracle_calls, run.certificate.pass ? "pass" : "FAIL",
                run.replay.pass ? "pass" : "FAIL");
  }
  return all_pass ? 0 : 1;
}

int run_fixed(const RunOptions& opt, std::uint64_t seed) {
  const instances::Instance inst = build_instance(opt.spec);
  const auto params = bounds::params_for(inst);
  bool all_pass = true;
  for (const auto& raw : opt.solvers) {
    const std::string solver = normalized_solver(raw);
    solvers::Trajectory traj = dispatch_fixed(solver, inst, opt, seed);
    solvers::metrics(traj, inst);

    const auto lower = bounds::make_envelope(lower_source_for(inst.kind), params);
    const auto upper = upper_for(solver, params);
    const fs::path dir(opt.outdir);
    solvers::save_trajectory_csv((dir / (solver + "_trajectory.csv")).string(), traj,
                                 lower, upper);
    const auto report =
        bounds::verdict(traj, lower, upper, bounds::Context::fixed_instance);
    bounds::save_verdict_csv((dir / (solver + "_verdict.csv")).string(), report);

    int asserted = 0, failed = 0;
    for (const auto& row : report.rows) {
      if (!row.asserted) continue;
      ++asserted;
      if (!row.pass) ++failed;
    }
    all_pass = all_pass && report.all_pass;
    std::printf("%-12s on %-6s  points=%-4zu asserted=%-3d failed=%-3d %s\n",
                solver.c_str(), to_string(inst.kind).c_str(), traj.points.size(),
                asserted, failed, report.all_pass ? "pass" : "FAIL");
  }
  return all_pass ? 0 : 1;
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

void print_checks(const std::vector<Check>& checks) {
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  for (const auto& c : checks) {
    std::printf("%-*s  %s%s%s\n", static_cast<int>(width), c.name.c_str(),
                c.pass ? "pass" : "FAIL", c.detail.empty() ? "" : "  ",
                c.detail.c_str());
  }
}

}  // namespace

std::uint64_t resolve_seed(std::uint64_t config_seed) {
  const char* env = std::getenv("SBL_SEED");
  if (env == nullptr || *env == '\0') return config_seed;
  try {
    return std::stoull(env, nullptr, 0);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("SBL_SEED is not a number: '") + env + "'");
  }
}

int cmd_gen(const GenOptions& opt) {
  return guarded([&] {
    if (!opt.spec.file.empty())
      throw std::invalid_argument("gen synthesizes an instance; --instance is not a gen flag");
    const instances::Instance inst = build_instance(opt.spec);
    instances::save_instance(inst, opt.output);
    std::printf("wrote %s (%s, k=%d, m=%d, n=%d)\n", opt.output.c_str(),
                to_string(inst.kind).c_str(), inst.k, inst.m, inst.n);
    return 0;
  });
}

int cmd_run(const RunOptions& opt) {
  return guarded([&] {
    if (opt.solvers.empty()) throw std::invalid_argument("need at least one --solver");
    const std::uint64_t seed = resolve_seed(opt.seed);
    fs::create_directories(opt.outdir);
    return opt.adversarial ? run_adversarial(opt, seed) : run_fixed(opt, seed);
  });
}

int cmd_verify(const VerifyOptions& opt) {
  instances::Instance inst;
  try {
    inst = instances::load_instance(opt.instance_file);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot load '" << opt.instance_file << "': " << e.what()
              << "\n";
    return 2;
  }
  return guarded([&] {
    std::vector<Check> checks;

    {
      const auto failures = instances::verify_instance_file(opt.instance_file);
      std::string detail;
      for (const auto& f : failures) detail += (detail.empty() ? "" : "; ") + f;
      checks.push_back({"instance structure and stored solution", failures.empty(),
                        detail});
    }
    {
      const auto sol = instances::closed_form(inst);
      const double r = instances::kkt_residual(inst, sol.x_star, sol.y_star);
      std::ostringstream os;
      os << "residual " << r;
      checks.push_back({"closed-form solution satisfies optimality system",
                        r <= 1e-9, os.str()});
    }

    if (inst.L_A > 0) {
      const int top = std::min(opt.max_order, 2 * inst.k - 1);
      for (int i = 0; i <= top; ++i) {
        const auto pair = krylov::krylov_pair(inst.A, inst.b, i);
        const auto closed_J = numerics::make_subspace(krylov::closed_J_basis(inst.m, inst.k, i));
        const auto closed_K = numerics::make_subspace(krylov::closed_K_basis(inst.n, inst.k, i));
        double worst = 0.0;
        for (int c = 0; c < closed_J.basis.cols(); ++c)
          worst = std::max(worst,
                           numerics::membership_residual(pair.J, closed_J.basis.col(c)));
        for (int c = 0; c < pair.J.basis.cols(); ++c)
          worst = std::max(worst,
                           numerics::membership_residual(closed_J, pair.J.basis.col(c)));
        for (int c = 0; c < closed_K.basis.cols(); ++c)
          worst = std::max(worst,
                           numerics::membership_residual(pair.K, closed_K.basis.col(c)));
        for (int c = 0; c < pair.K.basis.cols(); ++c)
          worst = std::max(worst,
                           numerics::membership_residual(closed_K, pair.K.basis.col(c)));
        std::ostringstream os;
        os << "max membership residual " << worst;
        checks.push_back({"krylov order " + std::to_string(i) +
                              " matches the explicit basis",
                          worst <= 1e-9, os.str()});
      }
    }

    for (const auto q : adversary::certified_quantities(inst.kind)) {
      const std::string name =
          "window minimum (" + krylov::to_string(q) + ") closed form vs numeric";
      try {
        const double v = krylov::min_over_K(inst, q);
        std::ostringstream os;
        os << "value " << v;
        checks.push_back({name, true, os.str()});
      } catch (const std::exception& e) {
        checks.push_back({name, false, e.what()});
      }
    }

    print_checks(checks);
    bool all = true;
    for (const auto& c : checks) all = all && c.pass;
    std::printf("verify: %s\n", all ? "pass" : "FAIL");
    return all ? 0 : 1;
  });
}

int cmd_bounds(const BoundsOptions& opt) {
  return guarded([&] {
    const instances::Instance inst = build_instance(opt.spec);
    const auto params = bounds::params_for(inst);

    std::vector<bounds::Source> sources;
    switch (inst.kind) {
      case instances::Kind::eco_i:
        sources = {bounds::Source::span_i, bounds::Source::general_i,
                   bounds::Source::upper_alm};
        break;
      case instances::Kind::eco_ii:
        sources = {bounds::Source::span_ii, bounds::Source::general_ii,
                   bounds::Source::upper_alm};
        break;
      case instances::Kind::eco_sc:
        sources = {bounds::Source::span_sc, bounds::Source::general_sc,
                   bounds::Source::upper_alm};
        break;
      case instances::Kind::spp_i:
        sources = {bounds::Source::saddle_i_remark, bounds::Source::upper_apg,
                   bounds::Source::upper_smoothing};
        break;
      case instances::Kind::spp_ii:
        sources = {bounds::Source::saddle_ii, bounds::Source::upper_apg,
                   bounds::Source::upper_smoothing};
        break;
      case instances::Kind::spp_sc:
        sources = {bounds::Source::saddle_sc, bounds::Source::upper_apg,
                   bounds::Source::upper_smoothing};
        break;
    }

    const int t_max = opt.t_max > 0 ? opt.t_max : inst.m;
    std::ostringstream body;
    body << "source,t,metric,value\n";
    char buf[64];
    for (const auto src : sources) {
      const auto env = bounds::make_envelope(src, params);
      const auto window = bounds::validity_window(src, inst.m);
      for (int t = std::max(opt.t_min, window.first);
           t <= std::min(t_max, window.last); ++t) {
        for (const auto& mv : env(t)) {
          std::snprintf(buf, sizeof buf, "%.17g", mv.value);
          body << to_string(src) << ',' << t << ',' << to_string(mv.metric) << ','
               << buf << '\n';
        }
      }
    }

    if (opt.output.empty()) {
      std::cout << body.str();
    } else {
      std::ofstream out(opt.output);
      if (!out) throw std::invalid_argument("cannot open '" + opt.output + "'");
      out << body.str();
    }
    return 0;
  });
}

int cmd_report(const ReportOptions& opt) {
  return guarded([&] {
    if (opt.inputs.empty()) throw std::invalid_argument("need at least one input CSV");
    std::string header;
    std::ostringstream body;
    for (const auto& path : opt.inputs) {
      std::ifstream in(path);
      if (!in) throw std::invalid_argument("cannot open '" + path + "'");
      std::string line;
      if (!std::getline(in, line))
        throw std::invalid_argument("'" + path + "' is empty");
      if (header.empty()) {
        header = line;
        body << "file," << header << '\n';
      } else if (line != header) {
        throw std::invalid_argument("'" + path + "' header does not match '" +
                                    opt.inputs.front() + "'");
      }
      while (std::getline(in, line)) {
        if (!line.empty()) body << path << ',' << line << '\n';
      }
    }
    if (opt.output.empty()) {
      std::cout << body.str();
    } else {
      std::ofstream out(opt.output);
      if (!out) throw std::invalid_argument("cannot open '" + opt.output + "'");
      out << body.str();
    }
    return 0;
  });
}

}  // namespace sbl::cli

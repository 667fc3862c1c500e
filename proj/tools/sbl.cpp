// Command-line front end.  All behavior lives in sbl::cli; this file only
// maps flags onto the option structs and exit codes.

#include <string>
#include <vector>

#include <CLI11.hpp>

#include <sbl/cli.hpp>

namespace {

void add_instance_flags(CLI::App* cmd, sbl::cli::InstanceSpec& spec,
                        bool with_file = true) {
  if (with_file)
    cmd->add_option("--instance", spec.file, "instance JSON file (wins over knobs)");
  cmd->add_option("--kind", spec.kind,
                  "eco-i | eco-ii | eco-sc | spp-i | spp-ii | spp-sc");
  cmd->add_option("--k", spec.k, "construction parameter k");
  cmd->add_option("--T", spec.T, "round budget; sets k = 2T + 4 when --k is absent");
  cmd->add_option("--m", spec.m, "constraint dimension (default 2k + 2)");
  cmd->add_option("--n", spec.n, "variable dimension (default m + 8)");
  cmd->add_option("--lf,--L_f", spec.L_f, "gradient Lipschitz constant");
  cmd->add_option("--la,--L_A", spec.L_A, "coupling operator norm");
  cmd->add_option("--mu", spec.mu, "strong convexity modulus (sc kinds)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"construction, solver, and bound toolkit for bilinear saddle-point "
               "and affinely constrained problems"};
  app.require_subcommand(1);

  sbl::cli::GenOptions gen;
  auto* cmd_gen = app.add_subcommand("gen", "synthesize an instance JSON file");
  add_instance_flags(cmd_gen, gen.spec, /*with_file=*/false);
  cmd_gen->add_option("--out", gen.output, "output path");

  sbl::cli::RunOptions run;
  auto* cmd_run = app.add_subcommand("run", "run solvers and check bound verdicts");
  add_instance_flags(cmd_run, run.spec);
  cmd_run->add_option("--solver", run.solvers,
                      "lalm | pdhg | smoothing | agd | penalty_agd | probe "
                      "(repeatable)")
      ->required();
  cmd_run->add_option("--eta", run.eta, "lalm stepsize ('auto' or a number)");
  cmd_run->add_option("--tau", run.tau, "pdhg primal stepsize (0 = 1/||A||)");
  cmd_run->add_option("--sigma", run.sigma, "pdhg dual stepsize (0 = 1/||A||)");
  cmd_run->add_option("--iters", run.iters, "iteration count (0 = k)");
  cmd_run->add_option("--eps", run.eps, "penalty_agd target accuracy");
  cmd_run->add_flag("--adversarial", run.adversarial,
                    "answer queries with the resisting oracle and emit a certificate");
  cmd_run->add_option("--outdir", run.outdir, "directory for CSV/JSON outputs");
  cmd_run->add_option("--seed", run.seed, "rng seed (SBL_SEED overrides)");

  sbl::cli::VerifyOptions verify;
  auto* cmd_verify = app.add_subcommand("verify", "re-derive and check an instance file");
  cmd_verify->add_option("file", verify.instance_file, "instance JSON file")->required();
  cmd_verify->add_option("--max-order", verify.max_order,
                         "highest Krylov order to cross-check");

  sbl::cli::BoundsOptions bounds;
  auto* cmd_bounds = app.add_subcommand("bounds", "print envelope tables as CSV");
  add_instance_flags(cmd_bounds, bounds.spec);
  cmd_bounds->add_option("--t-min", bounds.t_min, "first iteration index");
  cmd_bounds->add_option("--t-max", bounds.t_max, "last iteration index (0 = m)");
  cmd_bounds->add_option("--out", bounds.output, "output path (default stdout)");

  sbl::cli::ReportOptions report;
  auto* cmd_report = app.add_subcommand("report", "merge CSVs that share a header");
  cmd_report->add_option("inputs", report.inputs, "input CSV files")->required();
  cmd_report->add_option("--out", report.output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (cmd_gen->parsed()) return sbl::cli::cmd_gen(gen);
  if (cmd_run->parsed()) return sbl::cli::cmd_run(run);
  if (cmd_verify->parsed()) return sbl::cli::cmd_verify(verify);
  if (cmd_bounds->parsed()) return sbl::cli::cmd_bounds(bounds);
  if (cmd_report->parsed()) return sbl::cli::cmd_report(report);
  return 2;
}

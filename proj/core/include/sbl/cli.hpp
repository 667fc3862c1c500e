#pragma once

// Implementation of the sbl command-line verbs.  The binary in tools/ only
// parses flags; everything testable lives here.  Every cmd_* returns a process
// exit code: 0 all checks/assertions passed, 1 an asserted check failed,
// 2 the request itself was unusable (bad flags, bad file, bad regime).

#include <cstdint>
#include <string>
#include <vector>

namespace sbl::cli {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

// SBL_SEED in the environment overrides whatever the flags carry.
std::uint64_t resolve_seed(std::uint64_t config_seed);

// Where an instance comes from: a JSON file, or synthesis knobs.  A file wins
// when both are present.  --T implies k = 2T + 4 when k is unset; unset m, n
// fall back to the family defaults for k.
struct InstanceSpec {
  std::string file;
  std::string kind = "eco-i";
  int k = 0;
  int T = -1;
  int m = 0;
  int n = 0;
  double L_f = 1.0;
  double L_A = 1.0;
  double mu = 0.0;
};

struct GenOptions {
  InstanceSpec spec;
  std::string output = "instance.json";
};
int cmd_gen(const GenOptions& opt);

struct RunOptions {
  InstanceSpec spec;
  std::vector<std::string> solvers;  // lalm | pdhg | smoothing | agd | penalty_agd | probe
  std::string eta = "auto";          // lalm stepsize: "auto" or a number
  double tau = 0.0;                  // pdhg; 0 means 1/||A|| for both steps
  double sigma = 0.0;
  int iters = 0;                     // 0 means k iterations
  double eps = 1e-3;                 // penalty_agd target accuracy
  bool adversarial = false;
  std::string outdir = ".";
  std::uint64_t seed = kDefaultSeed;
};
int cmd_run(const RunOptions& opt);

struct VerifyOptions {
  std::string instance_file;
  int max_order = 6;  // Krylov orders cross-checked: 0 .. min(max_order, 2k-1)
};
int cmd_verify(const VerifyOptions& opt);

struct BoundsOptions {
  InstanceSpec spec;
  int t_min = 1;
  int t_max = 0;       // 0 means up to m
  std::string output;  // empty means stdout
};
int cmd_bounds(const BoundsOptions& opt);

struct ReportOptions {
  std::vector<std::string> inputs;  // CSVs with identical headers
  std::string output;               // empty means stdout
};
int cmd_report(const ReportOptions& opt);

}  // namespace sbl::cli

#pragma once

// Drives a first-order method against the resisting oracle and packages the
// outcome: the rotated instance the run "actually happened on", the lower-bound
// certificate, and a replay check of the recorded transcript.

#include <cstdint>
#include <string>

#include <sbl/adversary.hpp>
#include <sbl/instances.hpp>
#include <sbl/solvers.hpp>

namespace sbl::harness {

struct AdversarialConfig {
  std::string method = "lalm";  // lalm | probe | penalty_agd | smoothing | pdhg | agd
  instances::Kind kind = instances::Kind::eco_i;
  int T = 8;       // certified round budget: the oracle answers rounds 0..T
  int m = 0;       // 0 -> 2k + 2 with k = 2T + 4
  int n = 0;       // 0 -> m + 8
  double L_f = 1.0;
  double L_A = 2.0;
  double mu = 1.0;          // used by the *-sc kinds only
  double eps = 1e-3;        // penalty_agd target accuracy
  std::uint64_t seed = 0x5EED;
};

struct AdversarialRun {
  instances::Instance base;
  solvers::Trajectory trajectory;      // metrics measured on final_instance
  instances::Instance final_instance;  // rotated instance consistent with every answer
  Matrix U, V;
  adversary::Certificate certificate;
  adversary::ReplayVerdict replay;
  int oracle_calls = 0;
};

// Method/kind pairing used throughout: each method is sent against the family
// whose lower bound it is supposed to witness.
instances::Kind default_kind_for(const std::string& method);

// Fills in unset dimensions, builds the base instance, runs the method with as
// many iterations as fit in the T+1 round budget, then finalizes and replays.
AdversarialRun run_adversarial(const AdversarialConfig& cfg);

}  // namespace sbl::harness

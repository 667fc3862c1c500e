#pragma once

#include <string>
#include <vector>

#include <sbl/instances.hpp>
#include <sbl/krylov.hpp>
#include <sbl/oracle.hpp>
#include <sbl/types.hpp>

namespace sbl::adversary {

// What adversary_finalize certifies about the method's designated output:
// for each quantity, the measured value under the final rotated instance
// must dominate the certified minimum over the terminal Krylov space.
struct Certificate {
  std::string method;
  instances::Kind base_kind = instances::Kind::eco_i;
  int k = 0;
  int rounds = 0;
  // membership_residuals[s]: distance of the round-s query pair from the
  // rotated Krylov spaces it was steered into (max of the x and y side).
  std::vector<double> membership_residuals;
  double final_membership_residual = 0.0;
  std::vector<std::string> quantities;
  std::vector<double> certified_lower_values;
  std::vector<double> measured_values;
  std::vector<double> slacks;  // measured - certified
  bool pass = false;
};

void save_certificate(const Certificate& cert, const std::string& path);

// First-order oracle that answers queries while incrementally rotating a
// hidden hard instance, keeping every iterate of ANY method trapped in
// slowly growing rotated Krylov subspaces.  Construction verifies the
// structural preconditions (H K_{2s-1} in K_{2s} for s <= k/2, A K_{2s-1}
// in J_{2s}, A'J_{2s} in K_{2s}, h in K_0, b in J_0) numerically and names
// the violated inclusion on failure.
//
// Round s is answered only while s <= (k-4)/2 (so the terminal space
// K_{2 rounds + 1} still fits inside K_{k-1}); the next query throws with a
// window-exhausted message.  Callers wanting T answered rounds beyond the
// two per iteration of a typical primal-dual method should build the base
// with k = 2T + 4 and m > 2k.
class ResistingOracle final : public oracle::FirstOrderOracle {
 public:
  explicit ResistingOracle(instances::Instance base);

  const oracle::ProblemInfo& info() const override { return info_; }
  oracle::Answer query(const Vector& x, const Vector& y) override;
  const oracle::Transcript& transcript() const override { return transcript_; }

  const instances::Instance& base() const { return base_; }
  const Matrix& U() const { return U_; }
  const Matrix& V() const { return V_; }
  int rounds_answered() const { return rounds_; }
  int max_round_index() const { return max_round_index_; }
  bool finalized() const { return finalized_; }

  struct FinalizeResult {
    instances::Instance final_instance;
    Matrix U;
    Matrix V;
    Certificate certificate;
  };

  // One more rotation pair pulls the designated output (xbar, ybar) into the
  // terminal rotated Krylov space; returns the final instance together with
  // the lower-bound certificate.  The oracle answers no further queries.
  FinalizeResult finalize(const Vector& xbar, const Vector& ybar,
                          const std::string& method);

 private:
  numerics::Subspace rotated_K(const Matrix& U, int order) const;
  numerics::Subspace rotated_J(const Matrix& V, int order) const;
  oracle::Answer answer_with_current(const Vector& x, const Vector& y);

  instances::Instance base_;
  oracle::ProblemInfo info_;
  oracle::Transcript transcript_;
  Matrix U_;
  Matrix V_;
  int rounds_ = 0;
  int max_round_index_ = 0;
  int compositions_ = 0;
  bool finalized_ = false;
  std::vector<double> membership_residuals_;
};

struct ReplayVerdict {
  double max_deviation = 0.0;
  bool pass = false;
};

// Recompute every recorded answer under the final instance and compare with
// what was answered live: later rotations must never contradict earlier
// answers (pass iff max deviation <= 1e-8).
ReplayVerdict replay_consistency(const oracle::Transcript& transcript,
                                 const instances::Instance& final_instance);

// Quantities certified for each kind (obj_abs/feas for ECO-I, obj gap/feas
// for ECO-II, dist2/feas for ECO-SC, phi gap for the saddle kinds plus dist2
// for the strongly convex one).
std::vector<krylov::Quantity> certified_quantities(instances::Kind kind);

}  // namespace sbl::adversary

#pragma once

#include <string>
#include <vector>

#include "sbl/instances.hpp"
#include "sbl/types.hpp"

namespace sbl::oracle {

// The public problem data theta: everything a method may inspect directly.
// The matrices H and A are deliberately absent; methods reach them only
// through first-order queries.
struct ProblemInfo {
  instances::Kind kind = instances::Kind::eco_i;
  int m = 0;
  int n = 0;
  int k = 0;
  double L_f = 0.0;
  double L_A = 0.0;
  double mu = 0.0;
  double X_radius = kUnbounded;
  double Y_radius = kUnbounded;
  Vector h;
  Vector b;
};

ProblemInfo problem_info(const instances::Instance& inst);

// One oracle answer: all three pieces come back together and count as a
// single call, matching the counting model the lower bounds are stated in.
struct Answer {
  Vector grad_f;  // Hx - h
  Vector Ax;
  Vector Aty;
};

struct TranscriptEntry {
  int query_index = 0;
  Vector x;
  Vector y;
  Vector grad_f;
  Vector Ax;
  Vector Aty;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;

  int call_count() const { return static_cast<int>(entries.size()); }
};

// Answers (Hx - h, Ax, A'y) exactly and appends the exchange to the
// transcript. Dimension mismatch -> std::invalid_argument.
Answer query(const instances::Instance& inst, Transcript& transcript,
             const Vector& x, const Vector& y);

// Interface the solvers run against. Implementations: InstanceOracle
// (answers from a fixed instance) and the resisting oracle in the adversary
// module (answers while rotating the instance under the method's feet).
class FirstOrderOracle {
 public:
  virtual ~FirstOrderOracle() = default;
  virtual const ProblemInfo& info() const = 0;
  virtual Answer query(const Vector& x, const Vector& y) = 0;
  virtual const Transcript& transcript() const = 0;
};

class InstanceOracle final : public FirstOrderOracle {
 public:
  explicit InstanceOracle(const instances::Instance& inst);

  const ProblemInfo& info() const override { return info_; }
  Answer query(const Vector& x, const Vector& y) override;
  const Transcript& transcript() const override { return transcript_; }

  const instances::Instance& instance() const { return inst_; }

 private:
  instances::Instance inst_;
  ProblemInfo info_;
  Transcript transcript_;
};

struct SpanVerdict {
  // residuals[t-1] is the distance of iterates[t] from the span of the
  // first-order information at iterates[0..t-1], for t = 1, ...
  std::vector<double> residuals;
  bool pass = false;
};

// Checks the linear-span condition on an iterate sequence against the
// transcript of the run that produced it: iterates[t] must lie in
// span{grad_f(x^(j)), A'r^(j) : j < t}, r^(j) = Ax^(j) - b. The generators
// are reconstructed from transcript entries (grad_f/Ax from an entry whose
// query point matches the iterate; A'r^(j) from an entry whose y matches the
// residual). Generators the method never queried are absent from the span —
// a method that takes gradients at extrapolated or never-queried points
// fails here even if its iterates happen to satisfy the condition
// abstractly. Requires iterates[0] = 0; throws if the transcript has fewer
// entries than the iterate list.
SpanVerdict check_linear_span(const Transcript& transcript,
                              const std::vector<Vector>& iterates,
                              const Vector& b);

// JSON Lines export: one entry per line, vectors as arrays. Identical query
// sequences produce byte-identical files.
void save_transcript(const Transcript& transcript, const std::string& path);
Transcript load_transcript(const std::string& path);

}  // namespace sbl::oracle

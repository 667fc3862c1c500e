#include "sbl/oracle.hpp"

#include <Eigen/Dense>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sbl::oracle {

ProblemInfo problem_info(const instances::Instance& inst) {
  ProblemInfo info;
  info.kind = inst.kind;
  info.m = inst.m;
  info.n = inst.n;
  info.k = inst.k;
  info.L_f = inst.L_f;
  info.L_A = inst.L_A;
  info.mu = inst.mu;
  info.X_radius = inst.X_radius;
  info.Y_radius = inst.Y_radius;
  info.h = inst.h;
  info.b = inst.b;
  return info;
}

Answer query(const instances::Instance& inst, Transcript& transcript,
             const Vector& x, const Vector& y) {
  if (x.size() != inst.n || y.size() != inst.m) {
    throw std::invalid_argument("oracle::query: dimension mismatch");
  }
  Answer ans;
  ans.grad_f = inst.H * x - inst.h;
  ans.Ax = inst.A * x;
  ans.Aty = inst.A.transpose() * y;
  TranscriptEntry e;
  e.query_index = transcript.call_count();
  e.x = x;
  e.y = y;
  e.grad_f = ans.grad_f;
  e.Ax = ans.Ax;
  e.Aty = ans.Aty;
  transcript.entries.push_back(std::move(e));
  return ans;
}

InstanceOracle::InstanceOracle(const instances::Instance& inst)
    : inst_(inst), info_(problem_info(inst)) {}

Answer InstanceOracle::query(const Vector& x, const Vector& y) {
  return oracle::query(inst_, transcript_, x, y);
}

namespace {

bool matches(const Vector& a, const Vector& b, double tol) {
  return a.size() == b.size() && (a - b).norm() <= tol * (1.0 + b.norm());
}

}  // namespace

SpanVerdict check_linear_span(const Transcript& transcript,
                              const std::vector<Vector>& iterates,
                              const Vector& b) {
  if (iterates.empty()) return SpanVerdict{{}, true};
  if (iterates.front().norm() != 0.0) {
    throw std::invalid_argument(
        "check_linear_span: iterate sequence must start at zero");
  }
  if (transcript.call_count() < static_cast<int>(iterates.size())) {
    throw std::invalid_argument(
        "check_linear_span: transcript shorter than iterate list");
  }

  const int n = static_cast<int>(iterates.front().size());
  SpanVerdict verdict;
  verdict.pass = true;

  std::vector<Vector> generators;
  for (std::size_t t = 1; t < iterates.size(); ++t) {
    // Collect the first-order information of iterate t-1: the gradient and
    // Ax from a query at the iterate itself, and A'r from a query whose y
    // equals that residual. Whatever the method never asked for does not
    // enter the span.
    const Vector& prev = iterates[t - 1];
    const TranscriptEntry* at_prev = nullptr;
    for (const TranscriptEntry& e : transcript.entries) {
      if (matches(e.x, prev, 1e-10)) {
        at_prev = &e;
        break;
      }
    }
    if (at_prev != nullptr) {
      generators.push_back(at_prev->grad_f);
      const Vector r = at_prev->Ax - b;
      for (const TranscriptEntry& e : transcript.entries) {
        if (matches(e.y, r, 1e-10)) {
          generators.push_back(e.Aty);
          break;
        }
      }
    }

    const Vector& xt = iterates[t];
    double residual = xt.norm();
    if (!generators.empty()) {
      Matrix G(n, static_cast<int>(generators.size()));
      for (std::size_t j = 0; j < generators.size(); ++j) {
        G.col(static_cast<int>(j)) = generators[j];
      }
      // complete orthogonal decomposition: rank-deficient generator sets
      // (e.g. an all-zero gradient) still give the exact least-squares
      // residual instead of dividing by vanishing pivots
      const Vector w = G.completeOrthogonalDecomposition().solve(xt);
      residual = (G * w - xt).norm();
    }
    verdict.residuals.push_back(residual);
    if (!(residual <= 1e-8 * (1.0 + xt.norm()))) verdict.pass = false;
  }
  return verdict;
}

namespace {

nlohmann::json vec_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vector vec_from(const nlohmann::json& j) {
  Vector v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i];
  return v;
}

}  // namespace

void save_transcript(const Transcript& transcript, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write transcript file '" + path + "'");
  }
  for (const TranscriptEntry& e : transcript.entries) {
    nlohmann::json j;
    j["query_index"] = e.query_index;
    j["x"] = vec_json(e.x);
    j["y"] = vec_json(e.y);
    j["grad_f"] = vec_json(e.grad_f);
    j["Ax"] = vec_json(e.Ax);
    j["Aty"] = vec_json(e.Aty);
    out << j.dump() << "\n";
  }
}

Transcript load_transcript(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open transcript file '" + path + "'");
  }
  Transcript transcript;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    TranscriptEntry e;
    e.query_index = j.at("query_index").get<int>();
    e.x = vec_from(j.at("x"));
    e.y = vec_from(j.at("y"));
    e.grad_f = vec_from(j.at("grad_f"));
    e.Ax = vec_from(j.at("Ax"));
    e.Aty = vec_from(j.at("Aty"));
    transcript.entries.push_back(std::move(e));
  }
  return transcript;
}

}  // namespace sbl::oracle

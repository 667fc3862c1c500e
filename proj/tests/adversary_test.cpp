#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>
#include <sbl/adversary.hpp>
#include <sbl/instances.hpp>
#include <sbl/krylov.hpp>
#include <sbl/numerics.hpp>
#include <sbl/oracle.hpp>
#include <sbl/solvers.hpp>

using namespace sbl;
using instances::Kind;

namespace {

instances::Instance mk(Kind kind, int k, double L_f, double L_A, double mu = 0.0) {
  const auto d = instances::default_dims(k);
  return instances::make_instance(kind, d.m, d.n, k, L_f, L_A, mu);
}

}  // namespace

TEST_SUITE_BEGIN("adversary");

TEST_CASE("construction checks the structural preconditions") {
  CHECK_NOTHROW(adversary::ResistingOracle(mk(Kind::eco_i, 6, 1.0, 2.0)));
  // too small to hide anything: the window (k-4)/2 is empty
  CHECK_THROWS_AS(adversary::ResistingOracle(mk(Kind::eco_i, 3, 1.0, 2.0)),
                  std::invalid_argument);
  // violating h in K_0 must be caught and named
  auto bad = mk(Kind::eco_i, 6, 1.0, 2.0);
  bad.h(0) = 1.0;  // K_0 = span{e_2k}; e_1 is outside
  CHECK_THROWS_WITH_AS((adversary::ResistingOracle(bad)), doctest::Contains("h"),
                       std::invalid_argument);
}

TEST_CASE("span-respecting queries leave the rotations at the identity") {
  const auto inst = mk(Kind::eco_i, 12, 1.0, 2.0);
  adversary::ResistingOracle ro(inst);
  oracle::InstanceOracle plain(inst);
  const double eta = solvers::lalm_eta_auto(inst);
  const int T = 2;  // 2T+1 = 5 calls; k = 12 answers rounds 0..4 exactly
  auto traj_r = solvers::run_lalm(ro, eta, T);
  auto traj_p = solvers::run_lalm(plain, eta, T);
  // A method whose queries already live in the Krylov spaces never forces a
  // genuine rotation, so its run is indistinguishable from the plain oracle.
  CHECK((ro.U() - Matrix::Identity(inst.n, inst.n)).norm() < 1e-9);
  CHECK((ro.V() - Matrix::Identity(inst.m, inst.m)).norm() < 1e-9);
  REQUIRE(traj_r.raw_x.size() == traj_p.raw_x.size());
  for (std::size_t i = 0; i < traj_r.raw_x.size(); ++i) {
    CHECK((traj_r.raw_x[i] - traj_p.raw_x[i]).norm() <= 1e-10);
  }

  const auto fin = ro.finalize(traj_r.points.back().x, traj_r.points.back().y, "lalm");
  CHECK(fin.certificate.pass);
  CHECK(adversary::replay_consistency(ro.transcript(), fin.final_instance).pass);
}

TEST_CASE("off-span queries force nontrivial rotations that never contradict the past") {
  const auto inst = mk(Kind::eco_ii, 12, 1.0, 1.0);
  adversary::ResistingOracle ro(inst);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Vector xbar = Vector::Zero(inst.n);
  const int rounds = 3;  // window allows s <= (12-4)/2 = 4
  for (int s = 0; s < rounds; ++s) {
    Vector x(inst.n), y(inst.m);
    for (int i = 0; i < inst.n; ++i) x(i) = g(rng);
    for (int i = 0; i < inst.m; ++i) y(i) = g(rng);
    ro.query(x, y);
    xbar = x;
  }
  CHECK(ro.rounds_answered() == rounds);
  // fresh random directions cannot sit inside the thin Krylov spaces
  CHECK((ro.U() - Matrix::Identity(inst.n, inst.n)).norm() > 1e-3);

  const auto fin = ro.finalize(xbar, Vector::Zero(inst.m), "probe");
  // steering really pulled every query into the rotated spaces
  for (double r : fin.certificate.membership_residuals) CHECK(r <= 1e-8);
  CHECK(fin.certificate.final_membership_residual <= 1e-8);
  CHECK(fin.certificate.pass);
  CHECK(fin.certificate.rounds == rounds);

  const auto replay = adversary::replay_consistency(ro.transcript(), fin.final_instance);
  CHECK(replay.pass);
  CHECK(replay.max_deviation <= 1e-8);

  // the final instance is the base under (U, V)
  CHECK((fin.final_instance.H - fin.U.transpose() * inst.H * fin.U).norm() < 1e-9);
  CHECK((fin.final_instance.A - fin.V.transpose() * inst.A * fin.U).norm() < 1e-9);

  // negative control: replaying against a wrongly rotated instance must fail
  Matrix Ubad = fin.U;
  Ubad.col(0).swap(Ubad.col(1));
  auto tampered = fin.final_instance;
  tampered.H = Ubad.transpose() * inst.H * Ubad;
  const auto bad_replay = adversary::replay_consistency(ro.transcript(), tampered);
  CHECK(!bad_replay.pass);
  CHECK(bad_replay.max_deviation > 1e-3);
}

TEST_CASE("query after finalize and window exhaustion are rejected") {
  const auto inst = mk(Kind::eco_i, 6, 1.0, 2.0);  // answers rounds 0 and 1
  adversary::ResistingOracle ro(inst);
  const Vector x0 = Vector::Zero(inst.n);
  const Vector y0 = Vector::Zero(inst.m);
  ro.query(x0, y0);
  ro.query(x0, y0);
  CHECK_THROWS_WITH_AS(ro.query(x0, y0), doctest::Contains("grow k"),
                       std::runtime_error);
  const auto fin = ro.finalize(x0, y0, "manual");
  CHECK(ro.finalized());
  CHECK_THROWS_AS(ro.query(x0, y0), std::logic_error);
  (void)fin;
}

TEST_CASE("certified quantities per kind") {
  using krylov::Quantity;
  const auto qi = adversary::certified_quantities(Kind::eco_i);
  CHECK(qi == std::vector<Quantity>{Quantity::obj_abs, Quantity::feas});
  const auto qii = adversary::certified_quantities(Kind::eco_ii);
  CHECK(qii == std::vector<Quantity>{Quantity::obj, Quantity::feas});
  const auto qsc = adversary::certified_quantities(Kind::eco_sc);
  CHECK(qsc == std::vector<Quantity>{Quantity::dist2, Quantity::feas});
  const auto qspp = adversary::certified_quantities(Kind::spp_ii);
  CHECK(qspp == std::vector<Quantity>{Quantity::phi_gap});
  const auto qsppsc = adversary::certified_quantities(Kind::spp_sc);
  CHECK(qsppsc == std::vector<Quantity>{Quantity::dist2, Quantity::phi_gap});
}

TEST_CASE("certificate JSON is well formed") {
  const auto inst = mk(Kind::eco_i, 6, 1.0, 2.0);
  adversary::ResistingOracle ro(inst);
  ro.query(Vector::Zero(inst.n), Vector::Zero(inst.m));
  const auto fin = ro.finalize(Vector::Zero(inst.n), Vector::Zero(inst.m), "manual");

  namespace fs = std::filesystem;
  const auto path = (fs::temp_directory_path() / "sbl_cert.json").string();
  adversary::save_certificate(fin.certificate, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  CHECK(j.at("method") == "manual");
  CHECK(j.at("base_kind") == "ECO-I");
  CHECK(j.at("k") == 6);
  CHECK(j.at("pass").is_boolean());
  REQUIRE(j.at("quantities").is_array());
  CHECK(j.at("quantities").size() == j.at("measured_values").size());
  CHECK(j.at("quantities").size() == j.at("certified_lower_values").size());
  std::remove(path.c_str());
}

TEST_SUITE_END();

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include <sbl/instances.hpp>
#include <sbl/numerics.hpp>

using namespace sbl;
using instances::Kind;

namespace {

const double kSqrt2 = 1.4142135623730951;

instances::Instance mk(Kind kind, int k, double L_f, double L_A, double mu = 0.0) {
  const auto d = instances::default_dims(k);
  return instances::make_instance(kind, d.m, d.n, k, L_f, L_A, mu);
}

std::string temp_path(const char* name) {
  namespace fs = std::filesystem;
  return (fs::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE_BEGIN("instances");

TEST_CASE("two-step block and operator scaffolding") {
  const Matrix B = instances::make_B(1);
  CHECK(B(0, 0) == -1.0);
  CHECK(B(0, 1) == 1.0);
  CHECK(B(1, 0) == 1.0);
  CHECK(B(1, 1) == 0.0);

  // ||Lambda|| = 2, attained on the doubled-identity block.
  const auto [L, c] = instances::make_lambda_c(10, 18, 4);
  CHECK(L.rows() == 10);
  CHECK(L.cols() == 18);
  CHECK(numerics::spectral_norm(L) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(c.head(8).isOnes());
  CHECK(c.tail(2).isZero());
}

TEST_CASE("kind parsing round trip") {
  for (Kind k : instances::all_kinds()) {
    CHECK(instances::kind_from_string(instances::to_string(k)) == k);
  }
  CHECK(instances::kind_from_string("eco_ii") == Kind::eco_ii);
  CHECK_THROWS_AS(instances::kind_from_string("eco-x"), std::invalid_argument);
}

TEST_CASE("closed form frozen values, kind I") {
  // k=2, L_f=1, L_A=2: f* = L_f k^2/2 = 2, ||x*||^2 = k(2k+1)(4k+1)/3 = 30,
  // ||y*||^2 = 4 L_f^2 k^3 / L_A^2 = 8.
  const auto inst = mk(Kind::eco_i, 2, 1.0, 2.0);
  const auto sol = instances::closed_form(inst);
  CHECK(sol.opt_value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sol.x_norm_sq == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(sol.y_norm_sq == doctest::Approx(8.0).epsilon(1e-12));
  for (int i = 0; i < 4; ++i) CHECK(sol.x_star(i) == doctest::Approx(i + 1.0));
  CHECK((inst.A * sol.x_star - inst.b).norm() < 1e-12);
}

TEST_CASE("closed form frozen values, kind II") {
  // k=3, L_f=1, L_A=0: f* = -(L_f/4 + L_A/(2 sqrt 2)) k = -0.75, ||y*||^2 = k/4.
  const auto zero = mk(Kind::eco_ii, 3, 1.0, 0.0);
  const auto sol0 = instances::closed_form(zero);
  CHECK(sol0.opt_value == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(sol0.y_norm_sq == doctest::Approx(0.75).epsilon(1e-12));

  const auto inst = mk(Kind::eco_ii, 5, 1.0, 0.5);
  const auto sol = instances::closed_form(inst);
  CHECK(sol.opt_value ==
        doctest::Approx(-(0.25 + 0.5 / (2.0 * kSqrt2)) * 5.0).epsilon(1e-12));
  // y* = -(1/(2 sqrt 2)) on the first 2k coordinates.
  CHECK(sol.y_star(0) == doctest::Approx(-1.0 / (2.0 * kSqrt2)).epsilon(1e-12));
  CHECK(sol.y_star.tail(inst.m - 2 * inst.k).isZero());
}

TEST_CASE("closed form frozen values, strongly convex kind") {
  // k=1, mu=1, L_A=2: y* = (mu/L_A) i (4k-i+1) = (2, 3), ||y*||^2 = 13.
  const auto inst = mk(Kind::eco_sc, 1, 1.0, 2.0, 1.0);
  CHECK(inst.L_f == 1.0);  // L_f is pinned to mu for this family
  const auto sol = instances::closed_form(inst);
  CHECK(sol.y_star(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sol.y_star(1) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sol.y_norm_sq == doctest::Approx(13.0).epsilon(1e-12));
  CHECK(sol.opt_value == doctest::Approx(0.5 * 5.0).epsilon(1e-12));  // mu/2 ||x*||^2
}

TEST_CASE("saddle radii") {
  const auto inst = mk(Kind::spp_ii, 2, 1.0, 1.0);
  CHECK(inst.X_radius * inst.X_radius == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(inst.Y_radius * inst.Y_radius == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(instances::is_saddle(inst.kind));
  CHECK(!instances::is_saddle(Kind::eco_ii));
  CHECK(instances::is_strongly_convex(Kind::spp_sc));
}

TEST_CASE("kkt residual vanishes on closed forms across kinds") {
  for (Kind kind : instances::all_kinds()) {
    const double mu = instances::is_strongly_convex(kind) ? 1.5 : 0.0;
    // the "-II" regimes only admit L_A <= L_f
    const bool narrow = kind == Kind::eco_ii || kind == Kind::spp_ii;
    const double L_A = narrow ? 0.5 : 2.0;
    const auto inst = mk(kind, 3, 1.0, L_A, mu);
    const auto sol = instances::closed_form(inst);
    CAPTURE(instances::to_string(kind));
    CHECK(instances::kkt_residual(inst, sol.x_star, sol.y_star) < 1e-10);
  }
}

TEST_CASE("regime preconditions are named") {
  CHECK_THROWS_WITH_AS(mk(Kind::eco_ii, 2, 1.0, 2.0),
                       doctest::Contains("L_A <= L_f"), std::invalid_argument);
  CHECK_THROWS_AS(mk(Kind::spp_sc, 2, 1.0, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mk(Kind::eco_i, 2, 1.0, 0.0), std::invalid_argument);
  // m = 4 = 2k violates 2k < m
  CHECK_THROWS_AS(instances::make_instance(Kind::eco_i, 4, 12, 2, 1.0, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("evaluate matches hand computation") {
  const auto inst = mk(Kind::eco_i, 2, 1.0, 2.0);
  Vector x = Vector::Zero(inst.n);
  x(1) = 3.0;                      // e_2; objective only sees x_k = x_2 here
  const Vector y = Vector::Zero(inst.m);
  const auto e = instances::evaluate(inst, x, y);
  CHECK(e.f == doctest::Approx(4.5).epsilon(1e-12));  // (L_f/2) x_k^2
  CHECK(e.feas == doctest::Approx((inst.A * x - inst.b).norm()).epsilon(1e-12));
  CHECK((e.grad_f - (inst.H * x - inst.h)).norm() < 1e-14);
}

TEST_CASE("evaluator agrees with evaluate and fills saddle values") {
  const auto inst = mk(Kind::spp_ii, 3, 1.0, 1.0);
  instances::Evaluator eval(inst);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    Vector x(inst.n), y(inst.m);
    for (int i = 0; i < inst.n; ++i) x(i) = g(rng);
    for (int i = 0; i < inst.m; ++i) y(i) = g(rng);
    x = numerics::project_ball(x, inst.X_radius);
    y = numerics::project_ball(y, inst.Y_radius);
    const auto a = eval(x, y);
    const auto b = instances::evaluate(inst, x, y);
    CHECK(a.f == doctest::Approx(b.f).epsilon(1e-12));
    CHECK(a.phi == doctest::Approx(b.phi).epsilon(1e-10));
    CHECK(a.psi == doctest::Approx(b.psi).epsilon(1e-10));
    CHECK(a.phi - a.psi >= -1e-9);  // weak duality
  }
}

TEST_CASE("phi at the primal solution equals the optimal value") {
  for (Kind kind : {Kind::spp_i, Kind::spp_ii, Kind::spp_sc}) {
    const double mu = instances::is_strongly_convex(kind) ? 2.0 : 0.0;
    const auto inst = mk(kind, 2, 1.0, 1.0, mu);
    const auto sol = instances::closed_form(inst);
    const auto e = instances::evaluate(inst, sol.x_star, sol.y_star);
    CAPTURE(instances::to_string(kind));
    CHECK(e.phi == doctest::Approx(sol.opt_value).epsilon(1e-9));
  }
}

TEST_CASE("save and load round trip exactly") {
  const auto inst = mk(Kind::spp_sc, 2, 1.0, 2.0, 0.5);
  const auto path = temp_path("sbl_roundtrip.json");
  instances::save_instance(inst, path);
  const auto back = instances::load_instance(path);
  CHECK(back.kind == inst.kind);
  CHECK(back.m == inst.m);
  CHECK(back.n == inst.n);
  CHECK(back.k == inst.k);
  CHECK((back.H - inst.H).norm() == 0.0);
  CHECK((back.A - inst.A).norm() == 0.0);
  CHECK((back.h - inst.h).norm() == 0.0);
  CHECK((back.b - inst.b).norm() == 0.0);
  CHECK(back.X_radius == inst.X_radius);
  CHECK(back.Y_radius == inst.Y_radius);
  CHECK(instances::verify_instance_file(path).empty());
  std::remove(path.c_str());
}

TEST_CASE("unbounded X radius survives serialization") {
  const auto inst = mk(Kind::eco_i, 2, 1.0, 1.0);
  REQUIRE(!std::isfinite(inst.X_radius));
  const auto path = temp_path("sbl_unbounded.json");
  instances::save_instance(inst, path);
  CHECK(!std::isfinite(instances::load_instance(path).X_radius));
  std::remove(path.c_str());
}

TEST_CASE("verify_instance flags a perturbed right-hand side") {
  const auto inst = mk(Kind::eco_i, 3, 1.0, 2.0);
  CHECK(instances::verify_instance(inst).empty());
  auto bad = inst;
  bad.b(0) += 1e-3;
  CHECK(!instances::verify_instance(bad).empty());
}

TEST_CASE("rotate_instance maps solutions through the rotations") {
  const auto inst = mk(Kind::eco_ii, 3, 2.0, 1.0);
  // Build U fixing h (supported on e_{2k}) and V fixing b (ones on 2k coords).
  const int n = inst.n, m = inst.m;
  Matrix U = Matrix::Identity(n, n);
  // rotate in the plane of the last two coordinates, which h never touches
  const double th = 0.7;
  U(n - 2, n - 2) = std::cos(th);
  U(n - 2, n - 1) = -std::sin(th);
  U(n - 1, n - 2) = std::sin(th);
  U(n - 1, n - 1) = std::cos(th);
  Matrix V = Matrix::Identity(m, m);
  V(m - 2, m - 2) = std::cos(th);
  V(m - 2, m - 1) = -std::sin(th);
  V(m - 1, m - 2) = std::sin(th);
  V(m - 1, m - 1) = std::cos(th);

  const auto rot = instances::rotate_instance(inst, U, V);
  const auto sol = instances::closed_form(inst);
  const Vector xr = U.transpose() * sol.x_star;
  const Vector yr = V.transpose() * sol.y_star;
  CHECK(instances::kkt_residual(rot, xr, yr) < 1e-10);
  const auto e = instances::evaluate(rot, xr, yr);
  CHECK(e.f == doctest::Approx(sol.opt_value).epsilon(1e-12));

  // a rotation that moves h must be rejected
  Matrix badU = Matrix::Identity(n, n);
  badU(2 * inst.k - 1, 2 * inst.k - 1) = -1.0;  // flips the h support axis
  CHECK_THROWS_AS(instances::rotate_instance(inst, badU, V), std::invalid_argument);
  // non-orthogonal input must be rejected
  Matrix notQ = Matrix::Identity(n, n) * 1.01;
  CHECK_THROWS_AS(instances::rotate_instance(inst, notQ, V), std::invalid_argument);
}

TEST_SUITE_END();

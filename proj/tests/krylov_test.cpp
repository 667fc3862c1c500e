#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <sbl/instances.hpp>
#include <sbl/krylov.hpp>
#include <sbl/numerics.hpp>

using namespace sbl;
using instances::Kind;

namespace {

instances::Instance mk(Kind kind, int k, double L_f, double L_A, double mu = 0.0) {
  const auto d = instances::default_dims(k);
  return instances::make_instance(kind, d.m, d.n, k, L_f, L_A, mu);
}

// Largest principal-angle gap between equal-dimension subspaces: every basis
// vector of one must lie in the other and vice versa.
double span_gap(const numerics::Subspace& S, const numerics::Subspace& T) {
  REQUIRE(S.dim() == T.dim());
  double worst = 0.0;
  for (int j = 0; j < S.dim(); ++j) {
    worst = std::max(worst, numerics::membership_residual(T, S.basis.col(j)));
    worst = std::max(worst, numerics::membership_residual(S, T.basis.col(j)));
  }
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("krylov");

TEST_CASE("numeric pair matches the closed-form bases") {
  for (int k : {1, 2, 4}) {
    const auto lc = instances::make_lambda_c(2 * k + 3, 2 * k + 9, k);
    for (int i = 0; i <= 2 * k - 1; ++i) {
      const auto pair = krylov::krylov_pair(lc.Lambda, lc.c, i);
      CHECK(pair.J.dim() == i + 1);
      CHECK(pair.K.dim() == i + 1);
      const auto Jc = numerics::make_subspace(
          krylov::closed_J_basis(2 * k + 3, k, i));
      const auto Kc = numerics::make_subspace(
          krylov::closed_K_basis(2 * k + 9, k, i));
      CAPTURE(k);
      CAPTURE(i);
      CHECK(span_gap(pair.J, Jc) < 1e-9);
      CHECK(span_gap(pair.K, Kc) < 1e-9);
    }
  }
}

TEST_CASE("saturation at order 2k") {
  const auto lc = instances::make_lambda_c(8, 16, 3);
  CHECK_NOTHROW(krylov::krylov_pair(lc.Lambda, lc.c, 5));
  CHECK_THROWS_AS(krylov::krylov_pair(lc.Lambda, lc.c, 6), std::invalid_argument);
  CHECK_THROWS_AS(krylov::closed_J_basis(8, 3, 6), std::invalid_argument);
  CHECK_THROWS_AS(krylov::closed_K_basis(16, 3, -1), std::invalid_argument);
}

TEST_CASE("one-step growth: Lambda K_i lands in J_{i+1} and Lambda' J_i = K_i") {
  const int k = 3, m = 2 * k + 2, n = m + 8;
  const auto lc = instances::make_lambda_c(m, n, k);
  for (int i = 0; i + 1 <= 2 * k - 1; ++i) {
    const auto Ki = numerics::make_subspace(krylov::closed_K_basis(n, k, i));
    const auto Ji = numerics::make_subspace(krylov::closed_J_basis(m, k, i));
    const auto Jnext = numerics::make_subspace(krylov::closed_J_basis(m, k, i + 1));
    for (int j = 0; j < Ki.dim(); ++j) {
      const Vector img = lc.Lambda * Ki.basis.col(j);
      CHECK(numerics::membership_residual(Jnext, img) < 1e-10);
    }
    for (int j = 0; j < Ji.dim(); ++j) {
      const Vector img = lc.Lambda.transpose() * Ji.basis.col(j);
      CHECK(numerics::membership_residual(Ki, img) < 1e-10);
    }
  }
}

TEST_CASE("e_k enters K only at order k") {
  const int k = 4, n = 2 * k + 10;
  const Vector ek = Vector::Unit(n, k - 1);
  const auto Kprev = numerics::make_subspace(krylov::closed_K_basis(n, k, k - 1));
  const auto Kk = numerics::make_subspace(krylov::closed_K_basis(n, k, k));
  CHECK(!krylov::membership(ek, Kprev).member);
  CHECK(krylov::membership(ek, Kk).member);
}

TEST_CASE("frozen certified minima over K_{k-1}") {
  // ECO-I: min |f - f*| = f* = L_f k^2 / 2 because f vanishes on K_{k-1}.
  CHECK(krylov::min_over_K(mk(Kind::eco_i, 3, 1.0, 2.0), krylov::Quantity::obj_abs) ==
        doctest::Approx(4.5).epsilon(1e-10));
  // ECO-II with L_A = 0: min f = -(1/8)(L_f + sqrt2 L_A + L_A^2/(2L_f)) k.
  CHECK(krylov::min_over_K(mk(Kind::eco_ii, 2, 1.0, 0.0), krylov::Quantity::obj) ==
        doctest::Approx(-0.25).epsilon(1e-10));
  // feasibility: (L_A/2) sqrt(k).
  CHECK(krylov::min_over_K(mk(Kind::eco_i, 3, 1.0, 2.0), krylov::Quantity::feas) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
  // distance: k(k+1)(2k+1)/6.
  CHECK(krylov::min_over_K(mk(Kind::eco_sc, 4, 1.0, 1.0, 1.0), krylov::Quantity::dist2) ==
        doctest::Approx(30.0).epsilon(1e-10));
  // SPP-I primal gap: f* again.
  CHECK(krylov::min_over_K(mk(Kind::spp_i, 2, 1.0, 1.0), krylov::Quantity::phi_gap) ==
        doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("certified values agree with the numeric minimizer") {
  struct Case {
    Kind kind;
    krylov::Quantity q;
    double mu;
  };
  const Case cases[] = {
      {Kind::eco_i, krylov::Quantity::obj_abs, 0.0},
      {Kind::eco_i, krylov::Quantity::feas, 0.0},
      {Kind::eco_ii, krylov::Quantity::obj, 0.0},
      {Kind::eco_ii, krylov::Quantity::feas, 0.0},
      {Kind::eco_sc, krylov::Quantity::dist2, 1.0},
      {Kind::spp_i, krylov::Quantity::phi_gap, 0.0},
      {Kind::spp_sc, krylov::Quantity::dist2, 0.5},
  };
  for (const auto& c : cases) {
    const auto inst = mk(c.kind, 3, 2.0, 1.0, c.mu);
    const double cert = krylov::min_over_K(inst, c.q);
    const double num = krylov::min_over_K_numeric(inst, c.q);
    CAPTURE(instances::to_string(c.kind));
    CAPTURE(krylov::to_string(c.q));
    CHECK(std::abs(cert - num) <= 1e-7 * (1.0 + std::abs(cert)));
  }
  // The saddle-gap closed forms are certified lower bounds, not exact minima.
  for (Kind kind : {Kind::spp_ii, Kind::spp_sc}) {
    const double mu = instances::is_strongly_convex(kind) ? 1.0 : 0.0;
    const auto inst = mk(kind, 3, 2.0, 1.0, mu);
    const double cert = krylov::min_over_K(inst, krylov::Quantity::phi_gap);
    const double num = krylov::min_over_K_numeric(inst, krylov::Quantity::phi_gap);
    CAPTURE(instances::to_string(kind));
    CHECK(cert <= num + 1e-7 * (1.0 + std::abs(num)));
    CHECK(cert > 0.0);
  }
}

TEST_CASE("incompatible kind/quantity pairs are rejected") {
  CHECK_THROWS_AS(krylov::min_over_K(mk(Kind::eco_i, 2, 1.0, 1.0),
                                     krylov::Quantity::dist2),
                  std::invalid_argument);
  CHECK_THROWS_AS(krylov::min_over_K(mk(Kind::eco_ii, 2, 1.0, 1.0),
                                     krylov::Quantity::phi_gap),
                  std::invalid_argument);
}

TEST_SUITE_END();

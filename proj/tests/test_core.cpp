#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "memsx/grid.hpp"
#include "memsx/permittivity.hpp"

using namespace memsx;

namespace {

// adaptive-refinement quadrature oracle for int_0^delta ds/sigma
double adaptive_inv_integral(const PermittivityProfile& p, double x, double delta) {
  int n = 4097;
  double prev = n_delta_at(p, x, delta, n);
  for (int r = 0; r < 6; ++r) {
    n = 2 * (n - 1) + 1;
    const double cur = n_delta_at(p, x, delta, n);
    if (std::fabs(cur - prev) < 1e-15) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace

TEST_CASE("build_grid spacing and preconditions") {
  const Grid g = build_grid(8, 8, 4);
  CHECK(g.h_x == doctest::Approx(1.0 / 9.0));
  CHECK(g.mx() == 10);
  CHECK(g.x(g.mx() - 1) == doctest::Approx(1.0));

  CHECK_NOTHROW(build_grid(4, 4, 4));
  CHECK_THROWS_AS(build_grid(3, 8, 8), InvalidArgument);
  CHECK_THROWS_AS(build_grid(8, 3, 8), InvalidArgument);
  CHECK_THROWS_AS(build_grid(8, 8, 3), InvalidArgument);
}

TEST_CASE("grid interface lines share x coordinates") {
  const Grid g = build_grid(6, 5, 5);
  for (int i = 0; i < g.mx(); ++i) {
    CHECK(g.eta(g.n_z1 - 1) == doctest::Approx(1.0));
    CHECK(g.zeta(0) == doctest::Approx(0.0));
  }
}

TEST_CASE("deflection field invariants") {
  const Grid g = build_grid(8, 8, 4);
  CHECK_NOTHROW(flat_deflection(g, -0.2));
  CHECK_THROWS_AS(flat_deflection(g, -1.5), InvalidArgument);
  CHECK_THROWS_AS(flat_deflection(g, 4.5), InvalidArgument);

  std::vector<double> v(g.mx(), 0.0);
  v[3] = std::nan("");
  CHECK_THROWS_AS((DeflectionField{v}), InvalidArgument);

  const DeflectionField s = sine_deflection(g, -0.3);
  CHECK_NOTHROW(s.require_pinned());
  const DeflectionField f = flat_deflection(g, -0.2);
  CHECK_THROWS_AS(f.require_pinned(), InvalidArgument);

  // boundary case min(u) = -1 + 1e-9 constructs fine; the solvers gate it
  CHECK_NOTHROW(flat_deflection(g, -1.0 + 1e-9));
}

TEST_CASE("eval_permittivity closed forms and domain checks") {
  const PermittivityProfile c2 = PermittivityProfile::constant(2.0);
  CHECK(eval_permittivity(c2, 0.5, 0.0) == doctest::Approx(2.0));

  const PermittivityProfile aff = PermittivityProfile::affine(1.0, 1.0);
  CHECK(eval_permittivity(aff, 0.3, 0.5) == doctest::Approx(1.5));

  CHECK_THROWS_AS(eval_permittivity(c2, 1.5, 0.0), InvalidArgument);
  CHECK_THROWS_AS(eval_permittivity(c2, 0.5, -0.1), InvalidArgument);
}

TEST_CASE("profile flags and validation") {
  const PermittivityProfile c2 = PermittivityProfile::constant(2.0);
  CHECK(c2.constant_in_s());
  CHECK(c2.nondecreasing_in_s());
  CHECK(c2.ge_one());

  const PermittivityProfile aff = PermittivityProfile::affine(1.0, 1.0);
  CHECK(!aff.constant_in_s());
  CHECK(aff.nondecreasing_in_s());

  const PermittivityProfile sep = PermittivityProfile::separable(2.0, 0.3, 0.5);
  CHECK(!sep.constant_in_s());
  CHECK(sep.ge_one());
  CHECK(sep.eval(0.0, 0.0) == doctest::Approx(2.0 * 1.3));

  CHECK_THROWS_AS(PermittivityProfile::constant(-1.0), InvalidProfile);
  CHECK_THROWS_AS(PermittivityProfile::constant(0.0), InvalidProfile);
}

TEST_CASE("n_delta closed forms") {
  const Grid g = build_grid(8, 8, 4);

  const PermittivityProfile c2 = PermittivityProfile::constant(2.0);
  const auto nd = n_delta(c2, g, 0.1);
  for (double v : nd) CHECK(v == doctest::Approx(0.05).epsilon(1e-14));

  const PermittivityProfile aff = PermittivityProfile::affine(1.0, 1.0);
  const auto nd2 = n_delta(aff, g, 1.0);
  for (double v : nd2) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  const auto nd2f = n_delta(aff, g, 1.0, 257);
  for (double v : nd2f) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  const auto nd0 = n_delta(aff, g, 0.0);
  for (double v : nd0) CHECK(v == 0.0);

  CHECK_THROWS_AS(n_delta(c2, g, -0.1), InvalidArgument);
  CHECK_THROWS_AS(n_delta(c2, g, 0.1, 1), InvalidArgument);
}

TEST_CASE("n_delta monotone in delta") {
  const Grid g = build_grid(8, 8, 4);
  const PermittivityProfile sep = PermittivityProfile::separable(2.0, 0.4, 0.7);
  const auto a = n_delta(sep, g, 0.05);
  const auto b = n_delta(sep, g, 0.2);
  for (int i = 0; i < g.mx(); ++i) CHECK(a[i] <= b[i] + 1e-15);
}

TEST_CASE("n_delta converges at fourth order against the adaptive oracle") {
  const PermittivityProfile sep = PermittivityProfile::separable(2.0, 0.3, 0.9);
  const double x = 0.37, delta = 0.8;
  const double exact = adaptive_inv_integral(sep, x, delta);

  const double e1 = std::fabs(n_delta_at(sep, x, delta, 9) - exact);
  const double e2 = std::fabs(n_delta_at(sep, x, delta, 17) - exact);
  const double e3 = std::fabs(n_delta_at(sep, x, delta, 33) - exact);
  // halving h divides the error by ~16
  CHECK(e1 / e2 > 12.0);
  CHECK(e2 / e3 > 12.0);
}

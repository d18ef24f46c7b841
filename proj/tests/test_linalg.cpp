#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "memsx/linalg.hpp"
#include "memsx/rng.hpp"

using namespace memsx;

namespace {

// dense Gaussian elimination with partial pivoting: the solve oracle
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int j = 0; j < n; ++j) {
    int p = j;
    for (int i = j + 1; i < n; ++i)
      if (std::fabs(a[i][j]) > std::fabs(a[p][j])) p = i;
    std::swap(a[j], a[p]);
    std::swap(b[j], b[p]);
    for (int i = j + 1; i < n; ++i) {
      const double m = a[i][j] / a[j][j];
      for (int k = j; k < n; ++k) a[i][k] -= m * a[j][k];
      b[i] -= m * b[j];
    }
  }
  for (int j = n - 1; j >= 0; --j) {
    for (int k = j + 1; k < n; ++k) b[j] -= a[j][k] * b[k];
    b[j] /= a[j][j];
  }
  return b;
}

}  // namespace

TEST_CASE("banded lu matches dense elimination on random banded systems") {
  SplitMix64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + static_cast<int>(rng.next() % 40);
    const int kl = 1 + static_cast<int>(rng.next() % 3);
    const int ku = 1 + static_cast<int>(rng.next() % 3);
    BandedMatrix B(n, kl, ku);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) {
        double v = 2.0 * rng.uniform01() - 1.0;
        if (i == j) v += 4.0;  // keep it solvable
        B.at(i, j) = v;
        dense[i][j] = v;
      }
    std::vector<double> b(n);
    for (auto& v : b) v = 2.0 * rng.uniform01() - 1.0;

    const std::vector<double> expected = dense_solve(dense, b);
    B.factorize();
    std::vector<double> x = b;
    B.solve(x);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(expected[i]).epsilon(1e-10));
  }
}

TEST_CASE("banded lu needs pivoting to survive a zero diagonal") {
  BandedMatrix B(3, 1, 1);
  // [[0,1,0],[1,0,1],[0,1,1]] is nonsingular but has zero pivots without swaps
  B.at(0, 0) = 0.0;
  B.at(0, 1) = 1.0;
  B.at(1, 0) = 1.0;
  B.at(1, 1) = 0.0;
  B.at(1, 2) = 1.0;
  B.at(2, 1) = 1.0;
  B.at(2, 2) = 1.0;
  B.factorize();
  std::vector<double> b = {1.0, 2.0, 3.0};
  B.solve(b);
  CHECK(b[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(1.0));
  CHECK(b[2] == doctest::Approx(2.0));
}

TEST_CASE("pcg solves an spd laplacian to the requested tolerance") {
  const int n = 400;
  CsrMatrix A(n);
  for (int i = 0; i < n; ++i) {
    A.add(i, i, 2.0);
    if (i > 0) A.add(i, i - 1, -1.0);
    if (i + 1 < n) A.add(i, i + 1, -1.0);
  }
  A.finalize();
  std::vector<double> x_true(n);
  SplitMix64 rng(3);
  for (auto& v : x_true) v = rng.uniform01();
  std::vector<double> b(n);
  A.mul(x_true.data(), b.data());

  std::vector<double> x;
  const PcgReport rep = pcg_solve(A, b, x, 1e-12);
  CHECK(rep.residual <= 1e-12);
  double err = 0.0;
  for (int i = 0; i < n; ++i) err = std::max(err, std::fabs(x[i] - x_true[i]));
  CHECK(err <= 1e-7);
}

TEST_CASE("pcg reports failure with residual when capped") {
  const int n = 400;
  CsrMatrix A(n);
  for (int i = 0; i < n; ++i) {
    A.add(i, i, 2.0);
    if (i > 0) A.add(i, i - 1, -1.0);
    if (i + 1 < n) A.add(i, i + 1, -1.0);
  }
  A.finalize();
  std::vector<double> b(n, 1.0), x;
  CHECK_THROWS_AS(pcg_solve(A, b, x, 1e-14, 3), SolverFailure);
  try {
    pcg_solve(A, b, x, 1e-14, 3);
  } catch (const SolverFailure& e) {
    CHECK(e.iterations == 3);
    CHECK(e.residual > 0.0);
  }
}

TEST_CASE("pcg zero rhs short-circuits") {
  CsrMatrix A(4);
  for (int i = 0; i < 4; ++i) A.add(i, i, 1.0);
  A.finalize();
  std::vector<double> b(4, 0.0), x;
  const PcgReport rep = pcg_solve(A, b, x, 1e-10);
  CHECK(rep.iterations == 0);
  for (double v : x) CHECK(v == 0.0);
}

#pragma once

#include <map>
#include <vector>

#include "memsx/errors.hpp"
#include "memsx/params.hpp"

namespace memsx {

// Sparse symmetric matrix assembled in triplet form, finalized to CSR.
class CsrMatrix {
 public:
  explicit CsrMatrix(int n) : n_(n), rows_(n) {}

  int size() const { return n_; }
  void add(int i, int j, double v) { rows_[i][j] += v; }
  void finalize();

  void mul(const double* x, double* y) const;  // y = A x
  std::vector<double> diagonal() const;

  const std::vector<int>& rowptr() const { return rowptr_; }
  const std::vector<int>& colind() const { return colind_; }
  const std::vector<double>& values() const { return vals_; }

 private:
  int n_;
  std::vector<std::map<int, double>> rows_;  // cleared by finalize()
  std::vector<int> rowptr_, colind_;
  std::vector<double> vals_;
};

struct PcgReport {
  int iterations = 0;
  double residual = 0.0;  // relative two-norm residual
};

// Jacobi-preconditioned conjugate gradients. Throws SolverFailure when the
// iteration cap (50 sqrt(n) by default) is exceeded.
PcgReport pcg_solve(const CsrMatrix& a, const std::vector<double>& b,
                    std::vector<double>& x, double tol, int max_iter = 0);

// General banded matrix with kl sub- and ku superdiagonals, LAPACK-style
// band storage plus partial-pivoting LU. Used for the plate operators
// (pentadiagonal) and as the direct backend for the potential systems.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, int kl, int ku);

  int size() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  double& at(int i, int j);           // |i-j| <= band assumed
  double get(int i, int j) const;     // zero outside the band
  void add(int i, int j, double v) { at(i, j) += v; }

  void mul(const double* x, double* y) const;

  void factorize();  // in place; throws SolverFailure on exact singularity
  void solve(std::vector<double>& b) const;  // after factorize()
  bool factorized() const { return factorized_; }

 private:
  int n_ = 0, kl_ = 0, ku_ = 0, ld_ = 0;
  std::vector<double> a_;  // (2kl+ku+1) x n, column-major bands
  std::vector<int> piv_;
  bool factorized_ = false;
};

}  // namespace memsx

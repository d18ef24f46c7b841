#include "memsx/linalg.hpp"

#include <cmath>
#include <cstddef>

#include "memsx/kernels.hpp"

namespace memsx {

void CsrMatrix::finalize() {
  rowptr_.assign(n_ + 1, 0);
  std::size_t nnz = 0;
  for (int i = 0; i < n_; ++i) nnz += rows_[i].size();
  colind_.reserve(nnz);
  vals_.reserve(nnz);
  for (int i = 0; i < n_; ++i) {
    for (const auto& [j, v] : rows_[i]) {
      colind_.push_back(j);
      vals_.push_back(v);
    }
    rowptr_[i + 1] = static_cast<int>(colind_.size());
  }
  rows_.clear();
  rows_.shrink_to_fit();
}

void CsrMatrix::mul(const double* x, double* y) const {
  kernels::spmv_csr(rowptr_.data(), colind_.data(), vals_.data(), x, y,
                    static_cast<std::size_t>(n_));
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int k = rowptr_[i]; k < rowptr_[i + 1]; ++k)
      if (colind_[k] == i) d[i] = vals_[k];
  return d;
}

PcgReport pcg_solve(const CsrMatrix& a, const std::vector<double>& b, std::vector<double>& x,
                    double tol, int max_iter) {
  const std::size_t n = b.size();
  if (max_iter <= 0) max_iter = static_cast<int>(50.0 * std::sqrt(static_cast<double>(n))) + 10;
  x.assign(n, 0.0);

  const double bnorm = std::sqrt(kernels::dot(b.data(), b.data(), n));
  if (bnorm == 0.0) return {0, 0.0};

  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) d = (d != 0.0) ? 1.0 / d : 1.0;

  std::vector<double> r = b;            // r = b - A*0
  std::vector<double> z(n), p(n), q(n);
  kernels::hadamard(inv_diag.data(), r.data(), z.data(), n);
  p = z;
  double rz = kernels::dot(r.data(), z.data(), n);

  double res = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    a.mul(p.data(), q.data());
    const double pq = kernels::dot(p.data(), q.data(), n);
    if (pq <= 0.0)
      throw SolverFailure("pcg: loss of positive definiteness", res, it);
    const double alpha = rz / pq;
    kernels::axpy(alpha, p.data(), x.data(), n);
    kernels::axpy(-alpha, q.data(), r.data(), n);
    res = std::sqrt(kernels::dot(r.data(), r.data(), n)) / bnorm;
    if (res <= tol) return {it, res};
    kernels::hadamard(inv_diag.data(), r.data(), z.data(), n);
    const double rz_new = kernels::dot(r.data(), z.data(), n);
    kernels::axpby(1.0, z.data(), rz_new / rz, p.data(), n);
    rz = rz_new;
  }
  throw SolverFailure("pcg: iteration cap exceeded, residual=" + std::to_string(res), res,
                      max_iter);
}

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1) {
  a_.assign(static_cast<std::size_t>(ld_) * n_, 0.0);
  piv_.assign(n_, 0);
}

double& BandedMatrix::at(int i, int j) {
  const int off = kl_ + ku_ + i - j;
  if (off < 0 || off >= ld_ || i < 0 || i >= n_ || j < 0 || j >= n_)
    throw InvalidArgument("BandedMatrix::at outside band");
  return a_[static_cast<std::size_t>(j) * ld_ + off];
}

double BandedMatrix::get(int i, int j) const {
  const int off = kl_ + ku_ + i - j;
  if (off < kl_ || off >= ld_ || i < 0 || i >= n_ || j < 0 || j >= n_) return 0.0;
  return a_[static_cast<std::size_t>(j) * ld_ + off];
}

void BandedMatrix::mul(const double* x, double* y) const {
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    const int j0 = std::max(0, i - kl_);
    const int j1 = std::min(n_ - 1, i + ku_);
    for (int j = j0; j <= j1; ++j) s += get(i, j) * x[j];
    y[i] = s;
  }
}

void BandedMatrix::factorize() {
  // Unblocked banded LU with partial pivoting (dgbtf2 layout: entry (i,j)
  // lives at row kl+ku+i-j of column j; the top kl rows take pivot fill).
  const int kv = kl_ + ku_;
  auto ab = [&](int r, int c) -> double& { return a_[static_cast<std::size_t>(c) * ld_ + r]; };
  int ju = 0;
  for (int j = 0; j < n_; ++j) {
    const int km = std::min(kl_, n_ - 1 - j);
    int jp = 0;
    double amax = std::fabs(ab(kv, j));
    for (int p = 1; p <= km; ++p) {
      const double v = std::fabs(ab(kv + p, j));
      if (v > amax) {
        amax = v;
        jp = p;
      }
    }
    piv_[j] = j + jp;
    if (amax == 0.0) throw SolverFailure("banded lu: singular pivot", 0.0, j);
    ju = std::max(ju, std::min(j + ku_ + jp, n_ - 1));
    if (jp != 0) {
      for (int jj = j; jj <= ju; ++jj)
        std::swap(ab(kv + j + jp - jj, jj), ab(kv + j - jj, jj));
    }
    if (km > 0) {
      const double inv = 1.0 / ab(kv, j);
      for (int i = 1; i <= km; ++i) ab(kv + i, j) *= inv;
      for (int jj = j + 1; jj <= ju; ++jj) {
        const double mult = ab(kv + j - jj, jj);
        if (mult != 0.0)
          for (int i = 1; i <= km; ++i) ab(kv + j + i - jj, jj) -= ab(kv + i, j) * mult;
      }
    }
  }
  factorized_ = true;
}

void BandedMatrix::solve(std::vector<double>& b) const {
  if (!factorized_) throw InvalidArgument("BandedMatrix::solve before factorize");
  const int kv = kl_ + ku_;
  auto ab = [&](int r, int c) -> double {
    return a_[static_cast<std::size_t>(c) * ld_ + r];
  };
  for (int j = 0; j < n_ - 1; ++j) {
    if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
    const int km = std::min(kl_, n_ - 1 - j);
    for (int i = 1; i <= km; ++i) b[j + i] -= ab(kv + i, j) * b[j];
  }
  for (int j = n_ - 1; j >= 0; --j) {
    b[j] /= ab(kv, j);
    const int i0 = std::max(0, j - kv);
    for (int i = i0; i < j; ++i) b[i] -= ab(kv + i - j, j) * b[j];
  }
}

}  // namespace memsx

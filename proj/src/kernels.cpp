#include "memsx/kernels.hpp"

#include <cmath>
#include <cstddef>

namespace memsx::kernels {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby(double a, const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void hadamard(const double* x, const double* y, double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void spmv_csr(const int* rowptr, const int* colind, const double* vals, const double* x,
              double* y, std::size_t nrows) {
  for (std::size_t i = 0; i < nrows; ++i) {
    double s = 0.0;
    for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) s += vals[k] * x[colind[k]];
    y[i] = s;
  }
}

}  // namespace scalar

static const KernelTable kScalarTable = {
    scalar::dot, scalar::axpy, scalar::axpby, scalar::hadamard,
    scalar::max_abs, scalar::spmv_csr, "scalar"};

#if defined(__x86_64__)
// Defined in kernels_avx2.cpp (compiled with -mavx2 -mfma).
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void axpby(double a, const double* x, double b, double* y, std::size_t n);
void hadamard(const double* x, const double* y, double* z, std::size_t n);
double max_abs(const double* x, std::size_t n);
void spmv_csr(const int* rowptr, const int* colind, const double* vals, const double* x,
              double* y, std::size_t nrows);
}  // namespace avx2

static const KernelTable kAvx2Table = {
    avx2::dot, avx2::axpy, avx2::axpby, avx2::hadamard,
    avx2::max_abs, avx2::spmv_csr, "avx2"};
#endif

bool available(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(__x86_64__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Backend backend) {
#if defined(__x86_64__)
  if (backend == Backend::Avx2) return kAvx2Table;
#endif
  (void)backend;
  return kScalarTable;
}

namespace {

Backend detect() { return available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar; }

Backend g_backend = detect();
const KernelTable* g_active = &table(g_backend);

}  // namespace

const KernelTable& active() { return *g_active; }

Backend active_backend() { return g_backend; }

bool select(Backend backend) {
  if (!available(backend)) return false;
  g_backend = backend;
  g_active = &table(backend);
  return true;
}

}  // namespace memsx::kernels

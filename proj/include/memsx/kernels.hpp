#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace memsx::kernels {

// Data-parallel inner loops behind the PCG solver and nodal field updates.
// Every kernel has a scalar reference implementation; wider variants are
// selected once at startup from CPU features and must agree with the
// reference within rounding reassociation (see tests/test_kernels.cpp).

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);
using AxpbyFn = void (*)(double, const double*, double, double*, std::size_t);
using HadamardFn = void (*)(const double*, const double*, double*, std::size_t);
using MaxAbsFn = double (*)(const double*, std::size_t);
using SpmvCsrFn = void (*)(const int*, const int*, const double*, const double*,
                           double*, std::size_t);

struct KernelTable {
  DotFn dot;            // sum x_i y_i
  AxpyFn axpy;          // y += a x
  AxpbyFn axpby;        // y = a x + b y
  HadamardFn hadamard;  // z_i = x_i y_i
  MaxAbsFn max_abs;     // max |x_i|
  SpmvCsrFn spmv_csr;   // y = A x, CSR
  const char* name;
};

enum class Backend { Scalar, Avx2 };

// Active table (set once at load time, overridable for tests).
const KernelTable& active();
bool select(Backend backend);  // false if unavailable on this machine
Backend active_backend();
const KernelTable& table(Backend backend);
bool available(Backend backend);

inline double dot(const double* x, const double* y, std::size_t n) {
  return active().dot(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active().axpy(a, x, y, n);
}
inline void axpby(double a, const double* x, double b, double* y, std::size_t n) {
  active().axpby(a, x, b, y, n);
}
inline void hadamard(const double* x, const double* y, double* z, std::size_t n) {
  active().hadamard(x, y, z, n);
}
inline double max_abs(const double* x, std::size_t n) { return active().max_abs(x, n); }
inline void spmv_csr(const int* rowptr, const int* colind, const double* vals,
                     const double* x, double* y, std::size_t nrows) {
  active().spmv_csr(rowptr, colind, vals, x, y, nrows);
}

}  // namespace memsx::kernels

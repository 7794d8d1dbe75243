#pragma once

#include <cstddef>

namespace hran::kernels::detail {

double dot_scalar(const double* a, const double* b, size_t n);
void axpy_scalar(double alpha, const double* x, double* y, size_t n);

#if defined(__x86_64__) || defined(__i386__)
double dot_avx2(const double* a, const double* b, size_t n);
void axpy_avx2(double alpha, const double* x, double* y, size_t n);
#endif

#if defined(__aarch64__)
double dot_neon(const double* a, const double* b, size_t n);
void axpy_neon(double alpha, const double* x, double* y, size_t n);
#endif

}  // namespace hran::kernels::detail

#pragma once

#include <cstddef>

// Arithmetic inner loops behind the recurrent and attention layers.
// A scalar reference implementation always exists; on x86-64 an AVX2+FMA
// variant and on aarch64 a NEON variant are selected at runtime. The
// HRAN_KERNELS environment variable ("scalar", "avx2", "neon") overrides
// the automatic pick, and tests force backends via set_backend to check
// equivalence against the scalar reference.
namespace hran::kernels {

enum class Backend { scalar, avx2, neon };

Backend active_backend();
const char* backend_name(Backend b);
bool backend_supported(Backend b);
void set_backend(Backend b);  // throws validation_error if unsupported here

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, size_t n);

// y = W x, W row-major rows x cols
void matvec(const double* w, size_t rows, size_t cols, const double* x, double* y);

// y = W x + b
void matvec_bias(const double* w, size_t rows, size_t cols, const double* x,
                 const double* b, double* y);

// y += W x
void matvec_acc(const double* w, size_t rows, size_t cols, const double* x, double* y);

// y += W^T v  (y has cols entries, v has rows entries)
void matvec_t_acc(const double* w, size_t rows, size_t cols, const double* v, double* y);

// W += u v^T  (outer-product accumulate)
void outer_acc(const double* u, size_t rows, const double* v, size_t cols, double* w);

}  // namespace hran::kernels

#include "hran/kernels.hpp"

#include <cstdlib>
#include <string>

#include "hran/errors.hpp"
#include "kernels_detail.hpp"

namespace hran::kernels {

namespace {

using dot_fn = double (*)(const double*, const double*, size_t);
using axpy_fn = void (*)(double, const double*, double*, size_t);

struct Dispatch {
    Backend backend;
    dot_fn dot;
    axpy_fn axpy;
};

Dispatch make_dispatch(Backend b) {
    switch (b) {
#if defined(__x86_64__) || defined(__i386__)
        case Backend::avx2:
            return {Backend::avx2, detail::dot_avx2, detail::axpy_avx2};
#endif
#if defined(__aarch64__)
        case Backend::neon:
            return {Backend::neon, detail::dot_neon, detail::axpy_neon};
#endif
        default:
            return {Backend::scalar, detail::dot_scalar, detail::axpy_scalar};
    }
}

Backend detect_backend() {
    if (const char* env = std::getenv("HRAN_KERNELS")) {
        const std::string name(env);
        if (name == "scalar") return Backend::scalar;
        if (name == "avx2" && backend_supported(Backend::avx2)) return Backend::avx2;
        if (name == "neon" && backend_supported(Backend::neon)) return Backend::neon;
        // unknown or unsupported request falls through to autodetect
    }
#if defined(__x86_64__) || defined(__i386__)
    if (backend_supported(Backend::avx2)) return Backend::avx2;
#endif
#if defined(__aarch64__)
    return Backend::neon;
#endif
    return Backend::scalar;
}

Dispatch& dispatch() {
    static Dispatch d = make_dispatch(detect_backend());
    return d;
}

}  // namespace

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(__i386__)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend active_backend() { return dispatch().backend; }

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

void set_backend(Backend b) {
    if (!backend_supported(b)) {
        throw validation_error(std::string("kernel backend not supported on this host: ") +
                               backend_name(b));
    }
    dispatch() = make_dispatch(b);
}

double dot(const double* a, const double* b, size_t n) { return dispatch().dot(a, b, n); }

void axpy(double alpha, const double* x, double* y, size_t n) {
    dispatch().axpy(alpha, x, y, n);
}

void matvec(const double* w, size_t rows, size_t cols, const double* x, double* y) {
    const Dispatch& d = dispatch();
    for (size_t r = 0; r < rows; ++r) y[r] = d.dot(w + r * cols, x, cols);
}

void matvec_bias(const double* w, size_t rows, size_t cols, const double* x,
                 const double* b, double* y) {
    const Dispatch& d = dispatch();
    for (size_t r = 0; r < rows; ++r) y[r] = d.dot(w + r * cols, x, cols) + b[r];
}

void matvec_acc(const double* w, size_t rows, size_t cols, const double* x, double* y) {
    const Dispatch& d = dispatch();
    for (size_t r = 0; r < rows; ++r) y[r] += d.dot(w + r * cols, x, cols);
}

void matvec_t_acc(const double* w, size_t rows, size_t cols, const double* v, double* y) {
    const Dispatch& d = dispatch();
    for (size_t r = 0; r < rows; ++r) d.axpy(v[r], w + r * cols, y, cols);
}

void outer_acc(const double* u, size_t rows, const double* v, size_t cols, double* w) {
    const Dispatch& d = dispatch();
    for (size_t r = 0; r < rows; ++r) d.axpy(u[r], v, w + r * cols, cols);
}

}  // namespace hran::kernels

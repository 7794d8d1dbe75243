#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace hran {

using Vec = std::vector<double>;

// Dense row-major matrix.
struct Mat {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(size_t r, size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(size_t r, size_t c) { return a[r * cols + c]; }
    double operator()(size_t r, size_t c) const { return a[r * cols + c]; }

    double* row(size_t r) { return a.data() + r * cols; }
    const double* row(size_t r) const { return a.data() + r * cols; }

    size_t size() const { return a.size(); }
};

}  // namespace hran

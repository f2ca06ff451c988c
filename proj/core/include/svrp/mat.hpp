#ifndef SVRP_MAT_HPP
#define SVRP_MAT_HPP

#include <cassert>
#include <cstddef>
#include <vector>

namespace svrp {

// Dense row-major matrix of doubles. Value semantics throughout.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
    Mat(int r, int c, double fill) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, fill) {}

    double& operator()(int i, int j) {
        assert(i >= 0 && i < rows && j >= 0 && j < cols);
        return a[static_cast<std::size_t>(i) * cols + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < rows && j >= 0 && j < cols);
        return a[static_cast<std::size_t>(i) * cols + j];
    }

    double* row_ptr(int i) { return a.data() + static_cast<std::size_t>(i) * cols; }
    const double* row_ptr(int i) const { return a.data() + static_cast<std::size_t>(i) * cols; }

    std::size_t size() const { return a.size(); }

    bool operator==(const Mat& o) const = default;
};

}  // namespace svrp

#endif

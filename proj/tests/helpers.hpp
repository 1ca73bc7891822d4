#pragma once

// Shared helpers for the test binaries: tolerance comparators and the
// finite-difference oracle used to check analytic input gradients.

#include <cmath>
#include <random>
#include <vector>

#include "survnet/net.hpp"

namespace survnet::testing {

inline bool close_rel(double a, double b, double rtol, double atol = 1e-9) {
    return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b)) + atol;
}

/// dL/dx via central differences on the single-sample loss; independent of the
/// backpropagation path it is used to check.
inline Vector finite_diff_input_grad(const NetworkModel& model, const Matrix& x_row,
                                     const Matrix& y_row, double h = 1e-5) {
    Vector grad(x_row.cols());
    Matrix x = x_row;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double orig = x(0, j);
        x(0, j) = orig + h;
        const double up = loss(forward(model, x), y_row, model.output_head);
        x(0, j) = orig - h;
        const double down = loss(forward(model, x), y_row, model.output_head);
        x(0, j) = orig;
        grad[j] = (up - down) / (2.0 * h);
    }
    return grad;
}

inline Matrix random_matrix(int rows, int cols, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

/// Model whose weights/inputs are small dyadic rationals: every product and sum
/// in a forward pass is exact in double precision, so bit-level equality checks
/// are meaningful under any summation order.
inline NetworkModel dyadic_model(const std::vector<int>& dims, OutputHead head,
                                 std::uint64_t seed) {
    NetworkModel model = make_network(dims, head, seed);
    std::mt19937_64 rng(seed ^ 0xd1ad1cULL);
    std::uniform_int_distribution<int> pick(-16, 16);
    for (Matrix& w : model.weights)
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = pick(rng) / 16.0;
    for (Vector& b : model.biases)
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = pick(rng) / 16.0;
    return model;
}

inline Matrix dyadic_matrix(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(-16, 16);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = pick(rng) / 16.0;
    return m;
}

}  // namespace survnet::testing

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace survnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// splitmix64 step; used to derive independent seed streams from one base seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Matrix select_rows(const Matrix& x, const std::vector<int>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    return out;
}

inline Matrix select_cols(const Matrix& x, const std::vector<int>& cols) {
    Matrix out(x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = x.col(cols[j]);
    return out;
}

}  // namespace survnet

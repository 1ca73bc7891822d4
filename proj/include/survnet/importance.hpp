#pragma once

#include <vector>

#include "survnet/util.hpp"

namespace survnet {

enum class ScoreKind {
    AbsMean,     // S_j = (1/n) sum_i |g_ij|
    SquareMean,  // S_j = (1/n) sum_i g_ij^2
};

/// Per-variable importance scores computed from per-sample input gradients.
struct ImportanceVector {
    Vector scores;
    ScoreKind kind = ScoreKind::SquareMean;
    bool scaled = false;
    std::vector<int> zero_sd_columns;  // filled by apply_scale_correction
};

ImportanceVector score_abs_mean(const Matrix& gradients);
ImportanceVector score_square_mean(const Matrix& gradients);
ImportanceVector score(const Matrix& gradients, ScoreKind kind);

/// Rescale scores for data whose columns are not on a common scale: abs-mean scores
/// are multiplied by the sample sd of the matching column, square-mean scores by the
/// sample variance. Constant columns get score 0 and are listed in zero_sd_columns.
ImportanceVector apply_scale_correction(const ImportanceVector& scores, const Matrix& columns);

/// Indices of scores in ascending order; ties broken by ascending variable index.
std::vector<int> rank_ascending(const ImportanceVector& scores);

}  // namespace survnet

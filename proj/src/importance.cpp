#include "survnet/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "survnet/errors.hpp"

namespace survnet {

namespace {

void check_nonempty(const Matrix& gradients) {
    if (gradients.rows() < 1 || gradients.cols() < 1)
        throw ConfigError("importance scores need a nonempty gradient matrix");
}

}  // namespace

ImportanceVector score_abs_mean(const Matrix& gradients) {
    check_nonempty(gradients);
    ImportanceVector iv;
    iv.kind = ScoreKind::AbsMean;
    iv.scores = gradients.array().abs().colwise().mean();
    return iv;
}

ImportanceVector score_square_mean(const Matrix& gradients) {
    check_nonempty(gradients);
    ImportanceVector iv;
    iv.kind = ScoreKind::SquareMean;
    iv.scores = gradients.array().square().colwise().mean();
    return iv;
}

ImportanceVector score(const Matrix& gradients, ScoreKind kind) {
    return kind == ScoreKind::AbsMean ? score_abs_mean(gradients) : score_square_mean(gradients);
}

ImportanceVector apply_scale_correction(const ImportanceVector& scores, const Matrix& columns) {
    if (columns.cols() != scores.scores.size())
        throw ConfigError("scale correction needs one data column per score");
    if (columns.rows() < 2) throw ConfigError("scale correction needs at least two rows");
    ImportanceVector out = scores;
    out.scaled = true;
    out.zero_sd_columns.clear();
    const double n = static_cast<double>(columns.rows());
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
        const double mean = columns.col(j).mean();
        const double var = (columns.col(j).array() - mean).square().sum() / (n - 1.0);
        if (var <= 0.0) {
            out.scores[j] = 0.0;
            out.zero_sd_columns.push_back(static_cast<int>(j));
        } else {
            out.scores[j] *= (scores.kind == ScoreKind::AbsMean) ? std::sqrt(var) : var;
        }
    }
    return out;
}

std::vector<int> rank_ascending(const ImportanceVector& scores) {
    if (scores.scores.size() == 0) throw ConfigError("cannot rank an empty score vector");
    std::vector<int> order(scores.scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores.scores[a] != scores.scores[b]) return scores.scores[a] < scores.scores[b];
        return a < b;
    });
    return order;
}

}  // namespace survnet

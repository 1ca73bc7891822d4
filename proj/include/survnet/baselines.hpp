#pragma once

#include <vector>

#include "survnet/util.hpp"

namespace survnet {

struct TestResult {
    int variable = 0;
    double statistic = 0.0;
    double p_value = 1.0;
    bool degenerate = false;  // zero-variance input; statistic/p are placeholders
};

/// Welch two-sample t statistic per column with a two-sided normal-approximation
/// p-value (fine at the sample sizes this project targets). Columns with zero
/// variance in both classes get p = 1 and the degenerate flag.
std::vector<TestResult> t_test_per_variable(const Matrix& x, const std::vector<int>& labels);

/// Benjamini-Hochberg step-up selection at the given level.
std::vector<int> bh_select(const std::vector<double>& p_values, double level);

/// Two-group Bartlett variance test per column (chi-square with 1 df).
std::vector<TestResult> bartlett_test(const Matrix& x, const std::vector<int>& labels);

/// |mean(class 1) - mean(class 0)| per column, for log-scale expression values.
Vector log_fold_change(const Matrix& x, const std::vector<int>& labels);

}  // namespace survnet

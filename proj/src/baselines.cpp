#include "survnet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "survnet/errors.hpp"

namespace survnet {

namespace {

struct TwoGroups {
    std::vector<int> rows0;
    std::vector<int> rows1;
};

TwoGroups split_groups(const Matrix& x, const std::vector<int>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != x.rows())
        throw ShapeError("label count must match row count");
    TwoGroups g;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 0)
            g.rows0.push_back(static_cast<int>(i));
        else if (labels[i] == 1)
            g.rows1.push_back(static_cast<int>(i));
        else
            throw ConfigError("two-sample tests need labels in {0, 1}");
    }
    if (g.rows0.size() < 2 || g.rows1.size() < 2)
        throw ConfigError("each class needs at least two samples");
    return g;
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // sample variance, n-1 denominator
};

Moments column_moments(const Matrix& x, const std::vector<int>& rows, int col) {
    Moments m;
    for (int i : rows) m.mean += x(i, col);
    m.mean /= static_cast<double>(rows.size());
    for (int i : rows) m.var += (x(i, col) - m.mean) * (x(i, col) - m.mean);
    m.var /= static_cast<double>(rows.size() - 1);
    return m;
}

double normal_two_sided_p(double statistic) {
    return std::erfc(std::abs(statistic) / std::sqrt(2.0));
}

double chi2_1df_sf(double x) { return std::erfc(std::sqrt(x / 2.0)); }

}  // namespace

std::vector<TestResult> t_test_per_variable(const Matrix& x, const std::vector<int>& labels) {
    const TwoGroups g = split_groups(x, labels);
    const double n0 = static_cast<double>(g.rows0.size());
    const double n1 = static_cast<double>(g.rows1.size());
    std::vector<TestResult> results;
    results.reserve(static_cast<std::size_t>(x.cols()));
    for (int j = 0; j < x.cols(); ++j) {
        const Moments m0 = column_moments(x, g.rows0, j);
        const Moments m1 = column_moments(x, g.rows1, j);
        TestResult res;
        res.variable = j;
        const double se2 = m0.var / n0 + m1.var / n1;
        if (se2 <= 0.0) {
            res.statistic = 0.0;
            res.p_value = 1.0;
            res.degenerate = true;
        } else {
            res.statistic = (m1.mean - m0.mean) / std::sqrt(se2);
            res.p_value = normal_two_sided_p(res.statistic);
        }
        results.push_back(res);
    }
    return results;
}

std::vector<int> bh_select(const std::vector<double>& p_values, double level) {
    if (!(level > 0.0) || !(level < 1.0)) throw ConfigError("BH level must be in (0, 1)");
    const int m = static_cast<int>(p_values.size());
    std::vector<int> order(p_values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (p_values[a] != p_values[b]) return p_values[a] < p_values[b];
        return a < b;
    });
    int cutoff = 0;
    for (int k = 1; k <= m; ++k) {
        if (p_values[order[static_cast<std::size_t>(k - 1)]] <= level * k / m) cutoff = k;
    }
    std::vector<int> selected(order.begin(), order.begin() + cutoff);
    std::sort(selected.begin(), selected.end());
    return selected;
}

std::vector<TestResult> bartlett_test(const Matrix& x, const std::vector<int>& labels) {
    const TwoGroups g = split_groups(x, labels);
    const double n0 = static_cast<double>(g.rows0.size());
    const double n1 = static_cast<double>(g.rows1.size());
    const double dof_total = n0 + n1 - 2.0;
    const double correction =
        1.0 + (1.0 / (n0 - 1.0) + 1.0 / (n1 - 1.0) - 1.0 / dof_total) / 3.0;
    std::vector<TestResult> results;
    results.reserve(static_cast<std::size_t>(x.cols()));
    for (int j = 0; j < x.cols(); ++j) {
        const Moments m0 = column_moments(x, g.rows0, j);
        const Moments m1 = column_moments(x, g.rows1, j);
        TestResult res;
        res.variable = j;
        if (m0.var <= 0.0 || m1.var <= 0.0) {
            res.statistic = 0.0;
            res.p_value = 1.0;
            res.degenerate = true;
        } else {
            const double pooled = ((n0 - 1.0) * m0.var + (n1 - 1.0) * m1.var) / dof_total;
            const double stat = (dof_total * std::log(pooled) - (n0 - 1.0) * std::log(m0.var) -
                                 (n1 - 1.0) * std::log(m1.var)) /
                                correction;
            res.statistic = stat;
            res.p_value = chi2_1df_sf(std::max(stat, 0.0));
        }
        results.push_back(res);
    }
    return results;
}

Vector log_fold_change(const Matrix& x, const std::vector<int>& labels) {
    const TwoGroups g = split_groups(x, labels);
    Vector out(x.cols());
    for (int j = 0; j < x.cols(); ++j) {
        const Moments m0 = column_moments(x, g.rows0, j);
        const Moments m1 = column_moments(x, g.rows1, j);
        out[j] = std::abs(m1.mean - m0.mean);
    }
    return out;
}

}  // namespace survnet

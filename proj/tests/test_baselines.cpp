#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "helpers.hpp"
#include "survnet/baselines.hpp"
#include "survnet/datasets.hpp"
#include "survnet/errors.hpp"

using namespace survnet;
using namespace survnet::testing;

namespace {

/// Kolmogorov-Smirnov distance of a sample against U(0,1).
double ks_uniform(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        d = std::max(d, std::abs(values[i] - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - values[i]));
    }
    return d;
}

std::vector<int> half_labels(int n) {
    std::vector<int> labels(n, 0);
    for (int i = n / 2; i < n; ++i) labels[i] = 1;
    return labels;
}

}  // namespace

TEST_CASE("t-test: identical classes give p near 1") {
    Matrix half = random_matrix(100, 3, 0.0, 1.0, 5);
    Matrix x(200, 3);
    x.topRows(100) = half;
    x.bottomRows(100) = half;
    auto results = t_test_per_variable(x, half_labels(200));
    for (const TestResult& r : results) {
        CHECK(r.statistic == 0.0);
        CHECK(r.p_value == 1.0);
    }
}

TEST_CASE("t-test: a ten-sigma shift is decisive") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(2000, 1);
    for (int i = 0; i < 2000; ++i) x(i, 0) = g(rng) + (i < 1000 ? 0.0 : 10.0);
    auto results = t_test_per_variable(x, half_labels(2000));
    CHECK(results[0].p_value < 1e-10);
    CHECK(results[0].statistic > 0.0);
}

TEST_CASE("t-test: null p-values are uniform") {
    Matrix x = random_matrix(2000, 784, 0.0, 1.0, 17);
    auto results = t_test_per_variable(x, half_labels(2000));
    std::vector<double> pvals;
    for (const TestResult& r : results) pvals.push_back(r.p_value);
    CHECK(ks_uniform(pvals) < 0.05);
}

TEST_CASE("t-test: zero variance in both classes is flagged") {
    Matrix x = Matrix::Constant(40, 2, 3.0);
    x.col(1) = random_matrix(40, 1, 0.0, 1.0, 3).col(0);
    auto results = t_test_per_variable(x, half_labels(40));
    CHECK(results[0].degenerate);
    CHECK(results[0].p_value == 1.0);
    CHECK_FALSE(results[1].degenerate);
}

TEST_CASE("t-test input validation") {
    Matrix x = random_matrix(4, 2, 0.0, 1.0, 9);
    CHECK_THROWS_AS(t_test_per_variable(x, {0, 0, 0, 1}), ConfigError);
    CHECK_THROWS_AS(t_test_per_variable(x, {0, 0, 1, 2}), ConfigError);
}

TEST_CASE("bh_select: step-up arithmetic") {
    CHECK(bh_select(std::vector<double>(10, 1.0), 0.1).empty());

    std::vector<double> one_small(10, 1.0);
    one_small[4] = 0.05;  // 0.05 > 0.1 * 1/10, so nothing passes
    CHECK(bh_select(one_small, 0.1).empty());

    std::vector<double> all_small(10, 0.001);
    CHECK(bh_select(all_small, 0.1).size() == 10);

    // The admissible prefix ends at the largest k with p_(k) <= level*k/m.
    std::vector<double> mixed{0.001, 0.02, 0.04, 0.9};
    const auto sel = bh_select(mixed, 0.1);
    CHECK(sel == std::vector<int>{0, 1});

    CHECK_THROWS_AS(bh_select(mixed, 0.0), ConfigError);
    CHECK_THROWS_AS(bh_select(mixed, 1.0), ConfigError);
}

TEST_CASE("bh_select is monotone in the level") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> p(40);
        for (double& v : p) v = std::pow(u(rng), 2.0);
        const auto low = bh_select(p, 0.05);
        const auto high = bh_select(p, 0.2);
        CHECK(std::includes(high.begin(), high.end(), low.begin(), low.end()));
    }
}

TEST_CASE("bartlett: calibrated under the null, decisive under inflation") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(400, 300);
    for (int i = 0; i < 400; ++i)
        for (int j = 0; j < 300; ++j) x(i, j) = g(rng);
    auto null_results = bartlett_test(x, half_labels(400));
    std::vector<double> pvals;
    for (const TestResult& r : null_results) pvals.push_back(r.p_value);
    CHECK(ks_uniform(pvals) < 0.08);

    Matrix y(1000, 1);
    for (int i = 0; i < 1000; ++i) y(i, 0) = g(rng) * (i < 500 ? 1.0 : 3.0);
    auto inflated = bartlett_test(y, half_labels(1000));
    CHECK(inflated[0].p_value < 1e-6);

    Matrix z = Matrix::Constant(40, 1, 2.0);
    auto degenerate = bartlett_test(z, half_labels(40));
    CHECK(degenerate[0].degenerate);
}

TEST_CASE("log_fold_change: zero for identical means, additive otherwise") {
    Matrix half = random_matrix(50, 2, 0.0, 1.0, 31);
    Matrix x(100, 2);
    x.topRows(50) = half;
    x.bottomRows(50) = half;
    Vector lfc = log_fold_change(x, half_labels(100));
    CHECK(lfc[0] == 0.0);
    CHECK(lfc[1] == 0.0);

    x.bottomRows(50).col(0).array() += 1.5;
    lfc = log_fold_change(x, half_labels(100));
    CHECK(lfc[0] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("variance-inflated columns defeat the t-test") {
    // Mean-based testing finds almost nothing on the variance-only scheme.
    double bh_hits = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SimSpec spec;
        spec.n = 4000;
        spec.p = 784;
        spec.p_prime = 64;
        spec.seed = seed;
        LabeledDataset d = gen_dataset3(spec);
        auto results = t_test_per_variable(d.x, d.labels);
        std::vector<double> pvals;
        for (const TestResult& r : results) pvals.push_back(r.p_value);
        const std::set<int> truth(d.truth->begin(), d.truth->end());
        for (int id : bh_select(pvals, 0.1))
            if (truth.count(id)) bh_hits += 1.0;
    }
    CHECK(bh_hits / 10.0 < 2.0);
}

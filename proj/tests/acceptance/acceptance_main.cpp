// Acceptance suite: every criterion prints one [PASS]/[FAIL] line with the
// measured numbers. Run with no arguments for all nine, or pass criterion
// numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../helpers.hpp"
#include "survnet/baselines.hpp"
#include "survnet/datasets.hpp"
#include "survnet/fdr.hpp"
#include "survnet/importance.hpp"
#include "survnet/net.hpp"
#include "survnet/selection.hpp"

using namespace survnet;
using namespace survnet::testing;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += "FAILED: " + what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SelectionConfig paper_config(std::uint64_t seed, bool classification) {
    SelectionConfig cfg;
    cfg.hidden_dims = {40, 20};
    cfg.train.batch_size = 50;
    cfg.train.learning_rate = classification ? 0.05 : 0.01;
    cfg.train.max_epochs = 200;
    cfg.train.patience = 5;
    cfg.eta_star = 0.1;
    cfg.epsilon = 1.0;
    cfg.q = 0;
    cfg.seed = seed;
    return cfg;
}

LabeledDataset paper_dataset(Scheme scheme, std::uint64_t seed) {
    SimSpec spec;
    spec.scheme = scheme;
    spec.n = 10000;
    spec.p = 784;
    spec.p_prime = 64;
    spec.seed = seed;
    LabeledDataset d = generate(spec);
    assign_split(d, mix_seed(seed, 99));
    return d;
}

// --- 1. gradient correctness against central finite differences ------------

Check criterion1() {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dim(2, 16);
    std::uniform_int_distribution<int> depth(1, 3);
    int worst_model = -1;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const OutputHead head =
            (t % 2 == 0) ? OutputHead::SoftmaxCrossEntropy : OutputHead::IdentitySquaredError;
        std::vector<int> dims{dim(rng)};
        const int hidden_layers = depth(rng);
        for (int h = 0; h < hidden_layers; ++h) dims.push_back(dim(rng));
        dims.push_back(head == OutputHead::SoftmaxCrossEntropy ? dim(rng) : 1);
        NetworkModel model = make_network(dims, head, rng());

        Matrix x = random_matrix(1, dims.front(), -1.0, 1.0, rng());
        Matrix y;
        if (head == OutputHead::SoftmaxCrossEntropy) {
            std::vector<int> label{static_cast<int>(rng() % dims.back())};
            y = one_hot(label, dims.back());
        } else {
            y = random_matrix(1, 1, -2.0, 2.0, rng());
        }
        const Matrix g = input_gradients(model, x, y);
        const Vector fd = finite_diff_input_grad(model, x, y);
        for (int j = 0; j < dims.front(); ++j) {
            const double err = std::abs(g(0, j) - fd[j]) /
                               std::max({std::abs(g(0, j)), std::abs(fd[j]), 1e-4});
            if (err > worst) {
                worst = err;
                worst_model = t;
            }
            c.require(close_rel(g(0, j), fd[j], 1e-5),
                      "model " + std::to_string(t) + " input " + std::to_string(j));
        }
    }
    const double dt = elapsed_s(start);
    c.note("100 models, worst rel err " + std::to_string(worst) + " (model " +
           std::to_string(worst_model) + "), " + std::to_string(dt) + " s");
    c.require(dt < 10.0, "runtime under 10 s");
    return c;
}

// --- 2. exhaustive minimum-FDR oracle ---------------------------------------

Check criterion2() {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    const int pq_pairs[][2] = {{784, 784}, {784, 392}, {100, 300}, {7, 13}};
    long cells = 0;
    for (const auto& pq : pq_pairs) {
        for (int r = 2; r <= 60; ++r) {
            for (int r0 = 1; r0 < r; ++r0) {
                for (int m = 1; m <= r0; ++m) {
                    ++cells;
                    if (!verify_theorem1(r, r0, pq[0], pq[1], m)) {
                        c.require(false, "cell r=" + std::to_string(r) + " r0=" +
                                             std::to_string(r0) + " m=" + std::to_string(m));
                        return c;
                    }
                }
            }
        }
    }
    const double dt = elapsed_s(start);
    c.note(std::to_string(cells) + " cells, " + std::to_string(dt) + " s");
    c.require(dt < 5.0, "runtime under 5 s");
    return c;
}

// --- 3. step-size contract and corollaries ----------------------------------

Check criterion3() {
    Check c;
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> count(1, 2000);
    std::uniform_int_distribution<int> pq(1, 1000);
    std::uniform_real_distribution<double> frac(0.01, 0.99);
    std::uniform_real_distribution<double> eps_dist(1e-6, 1.0);
    long corollary1_checked = 0;
    for (long t = 0; t < 100000; ++t) {
        const int r0 = count(rng);
        const int r = r0 + count(rng);
        const int p = pq(rng);
        const int q = pq(rng);
        const double eta_hat = *estimate_fdr(r, r0, p, q);
        const double eta_star = eta_hat * frac(rng);
        const double eps = eps_dist(rng);

        const int m_eps = step_size(eta_hat, eta_star, r0, eps);
        c.require(m_eps >= 1 && m_eps <= r0, "step size in [1, r0]");

        const int m = step_size(eta_hat, eta_star, r0, 1.0);
        const auto after = estimate_fdr(r - m, r0 - m, p, q);
        c.require(after.has_value() && *after <= eta_star * (1.0 + 1e-12) + 1e-15,
                  "m surrogate removals reach the cutoff");

        const double threshold = (1.0 - eta_star / eta_hat) * r0;
        if (m >= 2 && static_cast<double>(m - 1) < threshold - 1e-9) {
            ++corollary1_checked;
            const auto before = estimate_fdr(r - (m - 1), r0 - (m - 1), p, q);
            c.require(before.has_value() && *before > eta_star,
                      "m-1 surrogate removals stay above the cutoff");
        }
        if (!c.ok) return c;
    }
    c.note("100000 tuples, corollary-1 branch hit " + std::to_string(corollary1_checked) +
           " times");
    return c;
}

// --- 4. independent-variable mean-shift reproduction ------------------------

Check criterion4() {
    Check c;
    double tp_sum = 0.0, fdr_sum = 0.0, est_sum = 0.0, worst_seed_s = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto start = std::chrono::steady_clock::now();
        LabeledDataset d = paper_dataset(Scheme::IndepMeanShift, seed);
        SelectionReport rep = run_selection(d, paper_config(seed, true));
        const double dt = elapsed_s(start);
        worst_seed_s = std::max(worst_seed_s, dt);
        tp_sum += rep.confusion->tp;
        fdr_sum += rep.confusion->actual_fdr;
        est_sum += rep.eta_hat_final;
        std::cout << "    seed " << seed << ": tp=" << rep.confusion->tp
                  << " fdr=" << rep.confusion->actual_fdr << " est=" << rep.eta_hat_final << " ("
                  << dt << " s)\n";
    }
    const double tp = tp_sum / 10.0, fdr = fdr_sum / 10.0, est = est_sum / 10.0;
    c.note("mean tp " + std::to_string(tp) + ", actual FDR " + std::to_string(fdr) +
           ", estimated " + std::to_string(est) + ", slowest seed " +
           std::to_string(worst_seed_s) + " s");
    c.require(tp >= 55.0, "mean true positives >= 55 of 64");
    c.require(fdr >= 0.02 && fdr <= 0.20, "mean actual FDR in [0.02, 0.20]");
    c.require(est >= 0.05 && est <= 0.15, "mean estimated FDR in [0.05, 0.15]");
    c.require(worst_seed_s < 600.0, "each seed under 10 minutes");
    return c;
}

// --- 5. variance-inflation reproduction -------------------------------------

Check criterion5() {
    Check c;
    double init_err_sum = 0.0, final_err_sum = 0.0, tp_sum = 0.0, bh_hits = 0.0;
    double final_err_max = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        LabeledDataset d = paper_dataset(Scheme::VarianceInflation, seed);
        SelectionReport rep = run_selection(d, paper_config(seed, true));
        init_err_sum += *rep.initial_test_error;
        final_err_sum += *rep.final_test_error;
        final_err_max = std::max(final_err_max, *rep.final_test_error);
        tp_sum += rep.confusion->tp;

        const auto t_results = t_test_per_variable(d.x, d.labels);
        std::vector<double> pvals;
        for (const TestResult& r : t_results) pvals.push_back(r.p_value);
        const std::set<int> truth(d.truth->begin(), d.truth->end());
        int hits = 0;
        for (int id : bh_select(pvals, 0.1))
            if (truth.count(id)) ++hits;
        bh_hits += hits;
        std::cout << "    seed " << seed << ": init_err=" << *rep.initial_test_error
                  << " final_err=" << *rep.final_test_error << " tp=" << rep.confusion->tp
                  << " bh_hits=" << hits << "\n";
    }
    const double init_err = init_err_sum / 5.0, final_err = final_err_sum / 5.0;
    c.note("mean initial err " + std::to_string(init_err) + ", mean final err " +
           std::to_string(final_err) + ", mean tp " + std::to_string(tp_sum / 5.0) +
           ", mean BH hits " + std::to_string(bh_hits / 5.0));
    c.require(init_err >= 0.45 && init_err <= 0.55, "initial test error in [45%, 55%]");
    c.require(final_err <= 0.05, "final test error at most 5%");
    c.require(bh_hits / 5.0 < 2.0, "t-test BH discoveries among the truth average below 2");
    c.require(tp_sum / 5.0 >= 10.0, "selection recovers at least 10 true variables on average");
    return c;
}

// --- 6. nonlinear-regression reproduction -----------------------------------

Check criterion6() {
    Check c;
    double init_loss_sum = 0.0, final_loss_sum = 0.0, tp_sum = 0.0, fdr_sum = 0.0, fdr_max = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        LabeledDataset d = paper_dataset(Scheme::NonlinearRegression, seed);
        SelectionReport rep = run_selection(d, paper_config(seed, false));
        init_loss_sum += rep.initial_test_loss;
        final_loss_sum += rep.final_test_loss;
        tp_sum += rep.confusion->tp;
        fdr_sum += rep.confusion->actual_fdr;
        fdr_max = std::max(fdr_max, rep.confusion->actual_fdr);
        std::cout << "    seed " << seed << ": init_loss=" << rep.initial_test_loss
                  << " final_loss=" << rep.final_test_loss << " tp=" << rep.confusion->tp
                  << " fdr=" << rep.confusion->actual_fdr << "\n";
    }
    const double tp = tp_sum / 5.0, fdr = fdr_sum / 5.0;
    c.note("mean loss " + std::to_string(init_loss_sum / 5.0) + " -> " +
           std::to_string(final_loss_sum / 5.0) + ", mean tp " + std::to_string(tp) +
           ", mean FDR " + std::to_string(fdr) + " (max " + std::to_string(fdr_max) + ")");
    c.require(final_loss_sum < init_loss_sum / 3.0, "final test loss below a third of initial");
    c.require(tp >= 60.0, "mean true positives >= 60 of 64");
    c.require(fdr_max <= 0.25, "actual FDR at most 0.25 for every seed");
    c.require(fdr >= 0.02 && fdr <= 0.20, "mean actual FDR in [0.02, 0.20]");
    return c;
}

// --- 7. elimination-rate robustness -----------------------------------------

Check criterion7() {
    Check c;
    LabeledDataset d = paper_dataset(Scheme::IndepMeanShift, 1);
    SelectionConfig fast = paper_config(1, true);
    SelectionReport rep_fast = run_selection(d, fast);
    SelectionConfig slow = fast;
    slow.epsilon = 0.5;
    SelectionReport rep_slow = run_selection(d, slow);

    const double size_fast = static_cast<double>(rep_fast.selected.size());
    const double size_slow = static_cast<double>(rep_slow.selected.size());
    const double rel_diff =
        std::abs(size_fast - size_slow) / std::max(size_fast, size_slow);
    const std::size_t steps_fast = rep_fast.history.size() - 1;
    const std::size_t steps_slow = rep_slow.history.size() - 1;
    c.note("eps=1: " + std::to_string(rep_fast.selected.size()) + " vars in " +
           std::to_string(steps_fast) + " steps; eps=0.5: " +
           std::to_string(rep_slow.selected.size()) + " vars in " + std::to_string(steps_slow) +
           " steps; rel size diff " + std::to_string(rel_diff));
    c.require(rel_diff <= 0.15, "selected-set sizes differ by at most 15%");
    c.require(steps_slow > steps_fast, "eps = 0.5 uses strictly more steps");
    return c;
}

// --- 8. linear-model identity ------------------------------------------------

Check criterion8() {
    Check c;
    NetworkModel model = make_network({5, 1}, OutputHead::IdentitySquaredError, 0);
    model.weights[0] << 0.8, -1.7, 2.4, 0.3, -0.05;
    model.biases[0].setZero();
    const Matrix x = random_matrix(500, 5, -1.0, 1.0, 51);
    const Matrix y = random_matrix(500, 1, -3.0, 3.0, 52);
    const Matrix g = input_gradients(model, x, y);
    const ImportanceVector s1 = score_abs_mean(g);
    const ImportanceVector s2 = score_square_mean(g);
    const Vector beta = model.weights[0].col(0);
    for (int j = 0; j < 5; ++j) {
        for (int k = 0; k < 5; ++k) {
            const double abs_ratio = std::abs(beta[j]) / std::abs(beta[k]);
            const double sq_ratio = (beta[j] * beta[j]) / (beta[k] * beta[k]);
            c.require(close_rel(s1.scores[j] / s1.scores[k], abs_ratio, 1e-10, 0.0),
                      "abs-mean ratio at (" + std::to_string(j) + "," + std::to_string(k) + ")");
            c.require(close_rel(s2.scores[j] / s2.scores[k], sq_ratio, 1e-10, 0.0),
                      "square-mean ratio at (" + std::to_string(j) + "," + std::to_string(k) + ")");
        }
    }
    c.note("25 coefficient pairs per score kind");
    return c;
}

// --- 9. variance-inflation generator calibration ----------------------------

Check criterion9() {
    Check c;
    double worst_sd_lo = 1.0, worst_sd_hi = 0.0, worst_z = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SimSpec spec;
        spec.scheme = Scheme::VarianceInflation;
        spec.n = 10000;
        spec.p = 784;
        spec.p_prime = 64;
        spec.seed = seed;
        LabeledDataset d = gen_dataset3(spec);
        for (int j : *d.truth) {
            double m0 = 0.0, m1 = 0.0;
            int n0 = 0, n1 = 0;
            for (int i = 0; i < d.n(); ++i) {
                if (d.labels[static_cast<std::size_t>(i)] == 1) {
                    m1 += d.x(i, j);
                    ++n1;
                } else {
                    m0 += d.x(i, j);
                    ++n0;
                }
            }
            m0 /= n0;
            m1 /= n1;
            double v0 = 0.0, v1 = 0.0;
            for (int i = 0; i < d.n(); ++i) {
                const double val = d.x(i, j);
                if (d.labels[static_cast<std::size_t>(i)] == 1)
                    v1 += (val - m1) * (val - m1);
                else
                    v0 += (val - m0) * (val - m0);
            }
            v0 /= (n0 - 1);
            v1 /= (n1 - 1);
            const double sd1 = std::sqrt(v1);
            worst_sd_lo = std::min(worst_sd_lo, sd1);
            worst_sd_hi = std::max(worst_sd_hi, sd1);
            c.require(sd1 >= 0.93 && sd1 <= 0.97,
                      "seed " + std::to_string(seed) + " column " + std::to_string(j) +
                          " inflated sd " + std::to_string(sd1));
            const double z = std::abs(m1 - m0) / std::sqrt(v0 / n0 + v1 / n1);
            worst_z = std::max(worst_z, z);
            c.require(z <= 3.0, "seed " + std::to_string(seed) + " column " + std::to_string(j) +
                                    " mean diff z " + std::to_string(z));
        }
    }
    c.note("inflated sd range [" + std::to_string(worst_sd_lo) + ", " +
           std::to_string(worst_sd_hi) + "], worst |z| " + std::to_string(worst_z));
    return c;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "input gradients match central finite differences", criterion1},
        {2, "minimum-FDR bound verified by exhaustive enumeration", criterion2},
        {3, "step size stays in [1, r0] and realizes both corollaries", criterion3},
        {4, "independent mean-shift scheme: recovery and FDR bands", criterion4},
        {5, "variance-inflation scheme: error drop and t-test contrast", criterion5},
        {6, "nonlinear regression scheme: loss drop and FDR bands", criterion6},
        {7, "elimination-rate robustness (eps 1 vs 0.5)", criterion7},
        {8, "linear-model importance identity", criterion8},
        {9, "variance-inflation generator calibration", criterion9},
    };

    std::vector<int> wanted;
    for (int a = 1; a < argc; ++a) wanted.push_back(std::atoi(argv[a]));

    int failures = 0;
    for (const Criterion& crit : criteria) {
        if (!wanted.empty() &&
            std::find(wanted.begin(), wanted.end(), crit.id) == wanted.end())
            continue;
        Check result;
        try {
            result = crit.run();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        std::cout << (result.ok ? "[PASS]" : "[FAIL]") << " criterion " << crit.id << ": "
                  << crit.name;
        if (!result.detail.empty()) std::cout << " -- " << result.detail;
        std::cout << std::endl;
        if (!result.ok) ++failures;
    }
    return failures;
}

#include "survnet/selection.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "survnet/errors.hpp"
#include "survnet/fdr.hpp"

namespace survnet {

namespace {

void check_config(const SelectionConfig& cfg) {
    if (!(cfg.eta_star > 0.0) || !(cfg.eta_star < 1.0))
        throw ConfigError("eta_star must be in (0, 1)");
    if (!(cfg.epsilon > 0.0) || cfg.epsilon > 1.0)
        throw ConfigError("elimination rate must be in (0, 1]");
    if (cfg.q < 0) throw ConfigError("q must be positive (or 0 for q = p)");
}

std::vector<int> network_dims(int input_dim, const std::vector<int>& hidden, int output_dim) {
    std::vector<int> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(output_dim);
    return dims;
}

int count_active_truth(const AugmentedDataset& aug, const std::vector<int>& truth) {
    int n = 0;
    for (int id : truth)
        if (aug.active[static_cast<std::size_t>(id)]) ++n;
    return n;
}

TrainConfig step_train_config(const SelectionConfig& cfg, std::uint64_t stream) {
    TrainConfig tc = cfg.train;
    tc.shuffle_seed = mix_seed(cfg.seed, stream);
    return tc;
}

}  // namespace

LoopOutcome run_elimination_loop(AugmentedDataset& aug, NetworkModel model,
                                 const Matrix& y_train, const Matrix& y_val,
                                 const std::vector<int>& train_rows,
                                 const std::vector<int>& val_rows, const SelectionConfig& cfg,
                                 const std::optional<std::vector<int>>& truth,
                                 const StepObserver& observer) {
    check_config(cfg);
    LoopOutcome out;
    std::vector<int> col_ids = aug.active_columns();
    if (model.input_dim() != static_cast<int>(col_ids.size()))
        throw ShapeError("model input dim does not match the active column count");

    Matrix x_train_active = select_rows(select_cols(aug.x, col_ids), train_rows);
    Matrix x_val_active = select_rows(select_cols(aug.x, col_ids), val_rows);

    for (int step = 0;; ++step) {
        const Counts c = counts(aug);
        const auto eta = estimate_fdr(c.r, c.r0, aug.p, aug.q);
        if (!eta.has_value()) {
            std::ostringstream msg;
            msg << "every original variable was eliminated at step " << step
                << " (r = r0 = " << c.r << ")";
            throw AbortedRunError(msg.str());
        }

        StepRecord rec;
        rec.step = step;
        rec.r = c.r;
        rec.r0 = c.r0;
        rec.eta_hat = *eta;
        rec.r_prime = truth ? count_active_truth(aug, *truth) : -1;

        if (*eta <= cfg.eta_star) {
            rec.m = 0;
            out.history.push_back(rec);
            break;
        }

        // Importance of every active column on the training split, recomputed on
        // the network that the last warm-start retraining converged to.
        const Matrix grads = input_gradients(model, x_train_active, y_train);
        ImportanceVector iv = score(grads, cfg.score_kind);
        if (cfg.scale_scores) iv = apply_scale_correction(iv, x_train_active);
        const std::vector<int> order = rank_ascending(iv);

        const int m = step_size(*eta, cfg.eta_star, c.r0, cfg.epsilon);
        rec.m = m;
        out.history.push_back(rec);

        // The m lowest-scoring columns go, originals and surrogates pooled.
        std::vector<bool> eliminated(col_ids.size(), false);
        std::vector<int> eliminate_ids;
        eliminate_ids.reserve(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            eliminated[static_cast<std::size_t>(order[k])] = true;
            eliminate_ids.push_back(col_ids[static_cast<std::size_t>(order[k])]);
        }
        deactivate(aug, eliminate_ids);
        out.history.back().eliminated = eliminate_ids;

        std::vector<int> keep_positions;
        std::vector<int> surviving_ids;
        for (std::size_t pos = 0; pos < col_ids.size(); ++pos) {
            if (eliminated[pos]) continue;
            keep_positions.push_back(static_cast<int>(pos));
            surviving_ids.push_back(col_ids[pos]);
        }
        NetworkModel reduced = drop_input_columns(model, keep_positions);
        col_ids = std::move(surviving_ids);
        if (observer) observer(out.history.back(), model, reduced);
        model = std::move(reduced);

        x_train_active = select_rows(select_cols(aug.x, col_ids), train_rows);
        x_val_active = select_rows(select_cols(aug.x, col_ids), val_rows);
        model = train(model, x_train_active, y_train, x_val_active, y_val,
                      step_train_config(cfg, 100 + static_cast<std::uint64_t>(step)))
                    .model;
    }

    out.model = std::move(model);
    out.active_ids = std::move(col_ids);
    return out;
}

SelectionReport run_selection(const LabeledDataset& data, const SelectionConfig& cfg,
                              const StepObserver& observer) {
    check_config(cfg);
    if (data.split.empty()) throw ConfigError("dataset has no split labels");
    const std::vector<int> train_rows = data.rows_in(SplitTag::Train);
    const std::vector<int> val_rows = data.rows_in(SplitTag::Validation);
    const std::vector<int> test_rows = data.rows_in(SplitTag::Test);
    if (train_rows.empty() || val_rows.empty() || test_rows.empty())
        throw ConfigError("dataset needs nonempty train, validation and test splits");

    const int p = data.p();
    const int q = cfg.q == 0 ? p : cfg.q;
    const int d_out = data.is_classification() ? data.n_classes : 1;
    const OutputHead head = data.is_classification() ? OutputHead::SoftmaxCrossEntropy
                                                     : OutputHead::IdentitySquaredError;

    const Matrix targets = data.targets();
    const Matrix y_train = select_rows(targets, train_rows);
    const Matrix y_val = select_rows(targets, val_rows);
    const Matrix y_test = select_rows(targets, test_rows);

    SelectionReport report;

    // Initial test metrics come from a model that never saw surrogate columns,
    // so the before/after comparison is not perturbed by the augmentation.
    {
        const Matrix x_train = select_rows(data.x, train_rows);
        const Matrix x_val = select_rows(data.x, val_rows);
        NetworkModel initial = make_network(network_dims(p, cfg.hidden_dims, d_out), head,
                                            mix_seed(cfg.seed, 1));
        initial = train(initial, x_train, y_train, x_val, y_val, step_train_config(cfg, 2)).model;
        const auto [loss0, err0] = evaluate(initial, select_rows(data.x, test_rows), y_test);
        report.initial_test_loss = loss0;
        report.initial_test_error = err0;
    }

    // Surrogates are built over the rows the selection loop sees (train and
    // validation); test rows stay outside the loop entirely.
    std::vector<int> loop_rows = train_rows;
    loop_rows.insert(loop_rows.end(), val_rows.begin(), val_rows.end());
    std::sort(loop_rows.begin(), loop_rows.end());
    AugmentedDataset aug = augment(select_rows(data.x, loop_rows), q, mix_seed(cfg.seed, 3));

    // Row indices of the train/val splits inside the augmented matrix.
    std::vector<int> aug_train_rows, aug_val_rows;
    for (std::size_t i = 0; i < loop_rows.size(); ++i) {
        if (data.split[static_cast<std::size_t>(loop_rows[i])] == SplitTag::Train)
            aug_train_rows.push_back(static_cast<int>(i));
        else
            aug_val_rows.push_back(static_cast<int>(i));
    }

    NetworkModel model = make_network(network_dims(p + q, cfg.hidden_dims, d_out), head,
                                      mix_seed(cfg.seed, 4));
    model = train(model, select_rows(aug.x, aug_train_rows), y_train,
                  select_rows(aug.x, aug_val_rows), y_val, step_train_config(cfg, 5))
                .model;

    LoopOutcome loop = run_elimination_loop(aug, std::move(model), y_train, y_val, aug_train_rows,
                                            aug_val_rows, cfg, data.truth, observer);
    report.history = loop.history;
    report.eta_hat_final = loop.history.back().eta_hat;

    // Remaining surrogates are removed before the final model is trained; the
    // surviving original-variable weights warm-start the final retraining.
    std::vector<int> keep_positions;
    report.selected.clear();
    for (std::size_t pos = 0; pos < loop.active_ids.size(); ++pos) {
        if (!aug.is_surrogate(loop.active_ids[pos])) {
            keep_positions.push_back(static_cast<int>(pos));
            report.selected.push_back(loop.active_ids[pos]);
        }
    }
    if (report.selected.empty())
        throw AbortedRunError("no original variables survived the selection");

    NetworkModel final_model = drop_input_columns(loop.model, keep_positions);
    const Matrix x_train_sel = select_rows(select_cols(data.x, report.selected), train_rows);
    const Matrix x_val_sel = select_rows(select_cols(data.x, report.selected), val_rows);
    final_model =
        train(final_model, x_train_sel, y_train, x_val_sel, y_val, step_train_config(cfg, 6)).model;

    const auto [loss1, err1] =
        evaluate(final_model, select_rows(select_cols(data.x, report.selected), test_rows), y_test);
    report.final_test_loss = loss1;
    report.final_test_error = err1;

    ImportanceVector final_iv =
        score(input_gradients(final_model, x_train_sel, y_train), cfg.score_kind);
    if (cfg.scale_scores) final_iv = apply_scale_correction(final_iv, x_train_sel);
    report.final_scores = final_iv.scores;
    report.final_model = std::move(final_model);

    if (data.truth) report.confusion = confusion_vs_truth(report.selected, *data.truth);
    return report;
}

std::pair<double, std::optional<double>> evaluate(const NetworkModel& model, const Matrix& x_test,
                                                  const Matrix& y_test) {
    if (x_test.rows() == 0) throw ConfigError("evaluate needs a nonempty test set");
    const Matrix outputs = forward(model, x_test);
    const double test_loss = loss(outputs, y_test, model.output_head);
    if (model.output_head != OutputHead::SoftmaxCrossEntropy) return {test_loss, std::nullopt};
    int wrong = 0;
    for (Eigen::Index i = 0; i < outputs.rows(); ++i) {
        Eigen::Index pred, actual;
        outputs.row(i).maxCoeff(&pred);
        y_test.row(i).maxCoeff(&actual);
        if (pred != actual) ++wrong;
    }
    return {test_loss, static_cast<double>(wrong) / static_cast<double>(outputs.rows())};
}

Confusion confusion_vs_truth(const std::vector<int>& selected, const std::vector<int>& truth) {
    const std::set<int> truth_set(truth.begin(), truth.end());
    Confusion c;
    for (int id : selected) {
        if (truth_set.count(id))
            ++c.tp;
        else
            ++c.fp;
    }
    c.fn = static_cast<int>(truth_set.size()) - c.tp;
    c.actual_fdr = static_cast<double>(c.fp) / std::max(c.tp + c.fp, 1);
    return c;
}

}  // namespace survnet

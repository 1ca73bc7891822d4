#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "survnet/datasets.hpp"
#include "survnet/importance.hpp"
#include "survnet/net.hpp"
#include "survnet/surrogate.hpp"

namespace survnet {

/// One row of the per-step trajectory: counts before elimination, the FDR
/// estimate they give, and the elimination size m chosen for the step (0 on
/// the stopping step). r_prime is the number of truly significant variables
/// still active, or -1 when no ground truth is available.
struct StepRecord {
    int step = 0;
    int r = 0;
    int r0 = 0;
    double eta_hat = 0.0;
    int m = 0;
    int r_prime = -1;
    std::vector<int> eliminated;  // global column ids removed by this step
};

struct Confusion {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    double actual_fdr = 0.0;  // fp / max(tp + fp, 1)
};

struct SelectionReport {
    std::vector<int> selected;  // original variable ids, ascending
    double eta_hat_final = 0.0;
    std::vector<StepRecord> history;
    double initial_test_loss = 0.0;
    double final_test_loss = 0.0;
    std::optional<double> initial_test_error;  // classification only
    std::optional<double> final_test_error;
    std::optional<Confusion> confusion;  // when ground truth is known
    NetworkModel final_model;            // retrained on the selected variables
    Vector final_scores;                 // importance of each selected variable
};

struct SelectionConfig {
    std::vector<int> hidden_dims{40, 20};
    TrainConfig train;        // learning_rate should match the task (0.05 / 0.01)
    double eta_star = 0.1;
    double epsilon = 1.0;
    int q = 0;                // 0 means q = p
    ScoreKind score_kind = ScoreKind::SquareMean;
    bool scale_scores = false;
    std::uint64_t seed = 1;
};

/// Called after each elimination step, before warm-start retraining resumes,
/// with the trained model as it was before the drop and the reduced model.
using StepObserver =
    std::function<void(const StepRecord&, const NetworkModel& before, const NetworkModel& after)>;

/// The full backward-elimination procedure: train an original-variables model
/// for the initial test metrics, bind surrogates and train the augmented
/// model, then repeatedly score variables, eliminate the lowest-ranked m and
/// warm-start retrain until the estimated FDR reaches eta_star; finally drop
/// the remaining surrogates and retrain for the final metrics.
SelectionReport run_selection(const LabeledDataset& data, const SelectionConfig& cfg,
                              const StepObserver& observer = {});

/// Loop core exposed for tests and callers that prepare their own augmented
/// state (e.g. with some columns pre-deactivated). `model` must be trained on
/// the currently active columns of `aug`.
struct LoopOutcome {
    std::vector<StepRecord> history;
    NetworkModel model;  // trained on the active columns at stop time
    std::vector<int> active_ids;
};
LoopOutcome run_elimination_loop(AugmentedDataset& aug, NetworkModel model,
                                 const Matrix& y_train, const Matrix& y_val,
                                 const std::vector<int>& train_rows,
                                 const std::vector<int>& val_rows, const SelectionConfig& cfg,
                                 const std::optional<std::vector<int>>& truth,
                                 const StepObserver& observer = {});

/// Mean test loss and, for classification, the argmax misclassification rate.
std::pair<double, std::optional<double>> evaluate(const NetworkModel& model, const Matrix& x_test,
                                                  const Matrix& y_test);

Confusion confusion_vs_truth(const std::vector<int>& selected, const std::vector<int>& truth);

}  // namespace survnet

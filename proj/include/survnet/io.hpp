#pragma once

#include <optional>
#include <string>
#include <vector>

#include "survnet/datasets.hpp"
#include "survnet/net.hpp"
#include "survnet/selection.hpp"

namespace survnet {

/// Shortest-round-trip decimal text for a double (what every CSV writer here uses).
std::string format_double(double v);

void write_dataset_csv(const LabeledDataset& data, const std::string& path);
/// Sidecar JSON: generator parameters, truth ids, split labels, grid shape.
void write_dataset_meta(const LabeledDataset& data, const SimSpec* spec, const std::string& path);
/// Dataset from CSV plus (optionally) a sidecar written by write_dataset_meta.
LabeledDataset read_dataset_csv(const std::string& csv_path, const std::string& meta_path);

void write_history_csv(const std::vector<StepRecord>& history, const std::string& path);
void write_scores_csv(const std::vector<int>& ids, const Vector& scores, const std::string& path);
/// h x w grid of scores with unselected cells at 0 (heatmap source data).
void write_heatmap_csv(const std::vector<int>& ids, const Vector& scores, int height, int width,
                       const std::string& path);

void write_report_json(const SelectionReport& report, const std::string& path);

void save_model(const NetworkModel& model, const std::string& path);
NetworkModel load_model(const std::string& path);

/// Per-run numbers cmd_report aggregates; one row per run directory.
struct RunSummary {
    double initial_test_loss = 0.0;
    double final_test_loss = 0.0;
    std::optional<double> initial_test_error;
    std::optional<double> final_test_error;
    int n_selected = 0;
    int true_positives = -1;  // -1 when no ground truth
    double estimated_fdr = 0.0;
    double actual_fdr = -1.0;
};

RunSummary read_run_summary(const std::string& report_json_path);

struct Aggregate {
    std::string metric;
    double mean = 0.0;
    double sd = 0.0;
    int n = 0;
};

std::vector<Aggregate> aggregate_runs(const std::vector<RunSummary>& runs);
void write_aggregate_csv(const std::vector<Aggregate>& rows, const std::string& path);

}  // namespace survnet

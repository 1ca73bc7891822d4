#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "survnet/util.hpp"

namespace survnet {

enum class Scheme {
    IndepMeanShift,       // iid U(0,1) columns, mean shift on the significant ones
    CorrelatedMeanShift,  // image pixels (or a correlated stand-in), same shift
    VarianceInflation,    // equal class means, inflated variance per significant column
    NonlinearRegression,  // linear/sin/exp/relu terms plus interactions
};

struct SimSpec {
    Scheme scheme = Scheme::IndepMeanShift;
    int n = 10000;
    int p = 784;
    int p_prime = 64;
    std::uint64_t seed = 1;
};

enum class SplitTag : std::uint8_t { Train = 0, Validation = 1, Test = 2 };

/// Samples-by-variables matrix with targets, optional ground truth and split labels.
struct LabeledDataset {
    Matrix x;
    std::vector<int> labels;  // classification targets; empty for regression
    Vector y;                 // regression targets; size 0 for classification
    int n_classes = 0;        // 0 means regression
    std::optional<std::vector<int>> truth;  // significant variable ids (simulated data)
    std::vector<SplitTag> split;            // empty until assign_split
    std::optional<std::array<int, 2>> grid;  // {height, width} for image-shaped data

    bool is_classification() const { return n_classes > 0; }
    int n() const { return static_cast<int>(x.rows()); }
    int p() const { return static_cast<int>(x.cols()); }
    std::vector<int> rows_in(SplitTag tag) const;
    /// Targets as a network-ready matrix (one-hot or single column).
    Matrix targets() const;
};

LabeledDataset gen_dataset1(const SimSpec& spec);

/// Pseudo-class mean-shift scheme on real images: rows are split into two random
/// classes and p_prime random pixels are shifted exactly as in gen_dataset1.
/// `images` must already be filtered to one digit/class of interest.
LabeledDataset gen_dataset2(const LabeledDataset& images, const SimSpec& spec);

LabeledDataset gen_dataset3(const SimSpec& spec);

/// signal_scale multiplies every beta coefficient; 0 leaves pure N(0,1) noise.
LabeledDataset gen_dataset4(const SimSpec& spec, double signal_scale = 1.0);

LabeledDataset generate(const SimSpec& spec);

/// Offline stand-in for image data: unit-variance-ish Gaussian field on an
/// h x w grid, smoothed so orthogonally adjacent pixels correlate at about 0.5,
/// then shifted/scaled to match the U(0,1) mean and sd. Not a paper scheme.
LabeledDataset correlated_grid_images(int n, int h, int w, std::uint64_t seed);

/// IDX (big-endian) image+label reader; pixels scaled to [0,1].
LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path);

/// MNIST-style pair of IDX file pairs with the distribution's own partition:
/// test files become the test split; the first validation_count training rows
/// become the validation split.
LabeledDataset load_idx_with_official_split(const std::string& train_images,
                                            const std::string& train_labels,
                                            const std::string& test_images,
                                            const std::string& test_labels,
                                            int validation_count = 5000);

/// Keep only rows whose label is in `digits`, relabeling to 0..k-1 in the given order.
LabeledDataset filter_classes(const LabeledDataset& data, const std::vector<int>& digits);

enum class TargetKind { Auto, Classes, Real };

/// Comma-separated numeric matrix; the target column is named (requires a header)
/// or given as a 0-based index prefixed with '#' (e.g. "#12").
LabeledDataset load_csv(const std::string& path, const std::string& target, bool has_header,
                        TargetKind kind = TargetKind::Auto);

/// 80/20 train/test split, then 30% of the training rows become validation.
void assign_split(LabeledDataset& data, std::uint64_t seed);

/// Standardize all rows with train-split column means/sds. Constant train columns
/// are centered but not divided; their ids are returned so callers can warn.
std::vector<int> standardize(LabeledDataset& data);

}  // namespace survnet

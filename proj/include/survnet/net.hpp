#pragma once

#include <cstdint>
#include <vector>

#include "survnet/util.hpp"

namespace survnet {

enum class HiddenActivation { Relu };

enum class OutputHead {
    SoftmaxCrossEntropy,   // classification: softmax outputs, cross-entropy loss
    IdentitySquaredError,  // regression: affine outputs, squared-error loss
};

/// Dense feed-forward network. weights[k] has shape layer_dims[k] x layer_dims[k+1];
/// biases[k] has length layer_dims[k+1].
struct NetworkModel {
    std::vector<int> layer_dims;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
    HiddenActivation hidden_activation = HiddenActivation::Relu;
    OutputHead output_head = OutputHead::SoftmaxCrossEntropy;
    std::uint64_t rng_seed = 0;

    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    /// Number of weight layers.
    int n_layers() const { return static_cast<int>(weights.size()); }
};

/// Fresh model with uniform(-l, l) weights, l = sqrt(6/(fan_in+fan_out)), zero biases.
NetworkModel make_network(const std::vector<int>& layer_dims, OutputHead head, std::uint64_t seed);

struct TrainConfig {
    int batch_size = 50;
    double learning_rate = 0.05;  // 0.01 is the regression default
    int max_epochs = 200;
    int patience = 5;
    std::uint64_t shuffle_seed = 0;
};

/// One minibatch. Targets are one-hot rows for classification, real rows for regression.
struct Batch {
    Matrix inputs;
    Matrix targets;
};

/// Network outputs for a block of samples (one row per sample). Softmax head rows
/// are probability vectors; identity head rows are raw affine outputs.
Matrix forward(const NetworkModel& model, const Matrix& inputs);

/// Mean per-sample loss: cross-entropy -sum_k y_k log p_k (log clamped at 1e-12),
/// or squared error 0.5*||y - yhat||^2.
double loss(const Matrix& outputs, const Matrix& targets, OutputHead head);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainResult {
    NetworkModel model;  // snapshot from the epoch with the lowest validation loss
    std::vector<EpochStats> history;
    int best_epoch = 0;
    double best_val_loss = 0.0;
};

/// Minibatch SGD with seeded shuffling and validation-loss early stopping.
/// Stops after cfg.patience epochs without improvement (or at max_epochs) and
/// returns the best-validation snapshot.
TrainResult train(const NetworkModel& init, const Matrix& x_train, const Matrix& y_train,
                  const Matrix& x_val, const Matrix& y_val, const TrainConfig& cfg);

/// Per-sample gradients of the single-sample loss with respect to each input:
/// entry (i, j) = dL(y_i, f(x_i)) / dx_j.
Matrix input_gradients(const NetworkModel& model, const Matrix& inputs, const Matrix& targets);

/// Model with only the given input columns kept. The first weight matrix retains
/// exactly the rows in keep_indices (bit-identical); all other layers are untouched,
/// which is what makes warm-started retraining after an elimination step work.
NetworkModel drop_input_columns(const NetworkModel& model, const std::vector<int>& keep_indices);

/// One-hot target matrix from integer class labels.
Matrix one_hot(const std::vector<int>& labels, int n_classes);

}  // namespace survnet

#include "survnet/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "survnet/errors.hpp"

namespace survnet {

namespace {

constexpr double kLogClamp = 1e-12;

void check_dims(const NetworkModel& model, const Matrix& inputs) {
    if (inputs.cols() != model.input_dim()) {
        std::ostringstream msg;
        msg << "input width " << inputs.cols() << " does not match model input dim "
            << model.input_dim();
        throw ShapeError(msg.str());
    }
}

Matrix softmax_rows(Matrix z) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double m = z.row(i).maxCoeff();
        z.row(i) = (z.row(i).array() - m).exp();
        z.row(i) /= z.row(i).sum();
    }
    return z;
}

/// Pre-activations and activations for every layer, kept for backprop.
struct ForwardCache {
    std::vector<Matrix> acts;  // acts[0] = inputs, acts[k] = activation after layer k
    std::vector<Matrix> pre;   // pre[k] = pre-activation of layer k
};

ForwardCache forward_cached(const NetworkModel& model, const Matrix& inputs) {
    ForwardCache cache;
    const int depth = model.n_layers();
    cache.acts.reserve(depth + 1);
    cache.pre.reserve(depth);
    cache.acts.push_back(inputs);
    for (int k = 0; k < depth; ++k) {
        Matrix z = cache.acts.back() * model.weights[k];
        z.rowwise() += model.biases[k].transpose();
        cache.pre.push_back(z);
        if (k + 1 < depth) {
            cache.acts.push_back(z.cwiseMax(0.0));  // ReLU
        } else if (model.output_head == OutputHead::SoftmaxCrossEntropy) {
            cache.acts.push_back(softmax_rows(std::move(z)));
        } else {
            cache.acts.push_back(std::move(z));
        }
    }
    return cache;
}

/// Per-sample output-layer delta dL/dz_out; identical form for both heads.
Matrix output_delta(const Matrix& outputs, const Matrix& targets) {
    return outputs - targets;
}

/// Deltas for hidden layers walking backwards; returns delta of layer `k` given
/// delta of layer `k+1`.
Matrix backprop_delta(const NetworkModel& model, const ForwardCache& cache, const Matrix& delta_next,
                      int k) {
    Matrix delta = delta_next * model.weights[k + 1].transpose();
    delta.array() *= (cache.pre[k].array() > 0.0).cast<double>();
    return delta;
}

}  // namespace

NetworkModel make_network(const std::vector<int>& layer_dims, OutputHead head, std::uint64_t seed) {
    if (layer_dims.size() < 2) throw ConfigError("a network needs at least input and output layers");
    for (int d : layer_dims) {
        if (d < 1) throw ConfigError("layer sizes must be positive");
    }
    NetworkModel model;
    model.layer_dims = layer_dims;
    model.output_head = head;
    model.rng_seed = seed;
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k + 1 < layer_dims.size(); ++k) {
        const int fan_in = layer_dims[k];
        const int fan_out = layer_dims[k + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        Matrix w(fan_in, fan_out);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
        model.weights.push_back(std::move(w));
        model.biases.push_back(Vector::Zero(fan_out));
    }
    return model;
}

Matrix forward(const NetworkModel& model, const Matrix& inputs) {
    check_dims(model, inputs);
    return forward_cached(model, inputs).acts.back();
}

double loss(const Matrix& outputs, const Matrix& targets, OutputHead head) {
    if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols())
        throw ShapeError("outputs and targets must have matching shapes");
    if (outputs.rows() == 0) throw ConfigError("loss of an empty batch");
    if (!outputs.allFinite() || !targets.allFinite())
        throw NumericError("non-finite values in loss inputs");
    if (head == OutputHead::SoftmaxCrossEntropy) {
        const auto clamped = outputs.array().max(kLogClamp);
        return -(targets.array() * clamped.log()).rowwise().sum().mean();
    }
    return 0.5 * (targets - outputs).array().square().rowwise().sum().mean();
}

TrainResult train(const NetworkModel& init, const Matrix& x_train, const Matrix& y_train,
                  const Matrix& x_val, const Matrix& y_val, const TrainConfig& cfg) {
    if (x_train.rows() == 0 || x_val.rows() == 0)
        throw ConfigError("training and validation splits must be nonempty");
    check_dims(init, x_train);
    check_dims(init, x_val);
    if (y_train.rows() != x_train.rows() || y_val.rows() != x_val.rows())
        throw ShapeError("target row counts must match input row counts");
    if (cfg.batch_size < 1 || cfg.batch_size > x_train.rows())
        throw ConfigError("batch_size must be in [1, training-set size]");
    if (cfg.patience < 1 || cfg.patience > cfg.max_epochs)
        throw ConfigError("patience must be in [1, max_epochs]");
    if (cfg.learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");

    const int n = static_cast<int>(x_train.rows());
    const int depth = init.n_layers();

    NetworkModel model = init;
    TrainResult result;
    result.model = model;
    result.best_val_loss = std::numeric_limits<double>::infinity();
    result.best_epoch = -1;

    std::mt19937_64 shuffle_rng(cfg.shuffle_seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    int epochs_since_best = 0;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss_sum = 0.0;
        for (int start = 0; start < n; start += cfg.batch_size) {
            const int m = std::min(cfg.batch_size, n - start);
            Matrix xb(m, x_train.cols());
            Matrix yb(m, y_train.cols());
            for (int i = 0; i < m; ++i) {
                xb.row(i) = x_train.row(order[start + i]);
                yb.row(i) = y_train.row(order[start + i]);
            }

            ForwardCache cache = forward_cached(model, xb);
            const double batch_loss = loss(cache.acts.back(), yb, model.output_head);
            if (!std::isfinite(batch_loss)) {
                std::ostringstream msg;
                msg << "training diverged (non-finite loss) at epoch " << epoch;
                throw TrainingError(msg.str());
            }
            epoch_loss_sum += batch_loss * m;

            // Mean-gradient SGD step.
            Matrix delta = output_delta(cache.acts.back(), yb);
            for (int k = depth - 1; k >= 0; --k) {
                const Matrix grad_w = cache.acts[k].transpose() * delta / m;
                const Vector grad_b = delta.colwise().mean();
                if (k > 0) delta = backprop_delta(model, cache, delta, k - 1);
                model.weights[k] -= cfg.learning_rate * grad_w;
                model.biases[k] -= cfg.learning_rate * grad_b;
            }
        }

        for (int k = 0; k < depth; ++k) {
            if (!model.weights[k].allFinite() || !model.biases[k].allFinite()) {
                std::ostringstream msg;
                msg << "training diverged (non-finite weights) at epoch " << epoch;
                throw TrainingError(msg.str());
            }
        }

        const double val_loss = loss(forward(model, x_val), y_val, model.output_head);
        if (!std::isfinite(val_loss)) {
            std::ostringstream msg;
            msg << "training diverged (non-finite validation loss) at epoch " << epoch;
            throw TrainingError(msg.str());
        }
        result.history.push_back({epoch, epoch_loss_sum / n, val_loss});

        if (val_loss < result.best_val_loss) {
            result.best_val_loss = val_loss;
            result.best_epoch = epoch;
            result.model = model;
            epochs_since_best = 0;
        } else if (++epochs_since_best >= cfg.patience) {
            break;
        }
    }
    return result;
}

Matrix input_gradients(const NetworkModel& model, const Matrix& inputs, const Matrix& targets) {
    check_dims(model, inputs);
    if (targets.rows() != inputs.rows() || targets.cols() != model.output_dim())
        throw ShapeError("target shape does not match model output dim");
    ForwardCache cache = forward_cached(model, inputs);
    Matrix delta = output_delta(cache.acts.back(), targets);
    for (int k = model.n_layers() - 2; k >= 0; --k) delta = backprop_delta(model, cache, delta, k);
    return delta * model.weights[0].transpose();
}

NetworkModel drop_input_columns(const NetworkModel& model, const std::vector<int>& keep_indices) {
    if (keep_indices.empty()) throw ConfigError("cannot drop every input column");
    for (std::size_t i = 0; i < keep_indices.size(); ++i) {
        if (keep_indices[i] < 0 || keep_indices[i] >= model.input_dim())
            throw ConfigError("keep index out of range");
        if (i > 0 && keep_indices[i] <= keep_indices[i - 1])
            throw ConfigError("keep indices must be strictly increasing");
    }
    NetworkModel reduced = model;
    reduced.layer_dims[0] = static_cast<int>(keep_indices.size());
    Matrix w0(keep_indices.size(), model.weights[0].cols());
    for (std::size_t i = 0; i < keep_indices.size(); ++i)
        w0.row(static_cast<Eigen::Index>(i)) = model.weights[0].row(keep_indices[i]);
    reduced.weights[0] = std::move(w0);
    return reduced;
}

Matrix one_hot(const std::vector<int>& labels, int n_classes) {
    if (n_classes < 2) throw ConfigError("one_hot needs at least two classes");
    Matrix y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes) throw DataError("class label out of range");
        y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    }
    return y;
}

}  // namespace survnet

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace driftguard::nn {

/// Flat parameter vector of a fully connected tanh network with a softmax
/// output. `layer_sizes` lists input dim, hidden widths, then class count.
/// Each layer stores a row-major [fan_out x fan_in] weight block followed by
/// fan_out biases.
struct ParamVector {
    std::vector<double> values;
    std::vector<std::size_t> layer_sizes;

    std::size_t size() const { return values.size(); }
    std::size_t layer_count() const { return layer_sizes.size() - 1; }
    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t class_count() const { return layer_sizes.back(); }

    /// Offset of layer l's weight block inside `values`.
    std::size_t layer_offset(std::size_t l) const;
    /// [begin, end) of the output layer's weights and biases.
    std::pair<std::size_t, std::size_t> output_layer_range() const;

    /// Throws ShapeError if the value count disagrees with the shapes, or
    /// NumericError if any entry is non-finite.
    void validate() const;

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

/// Number of parameters implied by a layer-size list.
std::size_t parameter_count(std::span<const std::size_t> layer_sizes);

/// Row-major [n x dim] features with one class label per row.
struct LabeledBatch {
    std::size_t dim{0};
    std::vector<double> features;
    std::vector<int> labels;

    std::size_t rows() const { return labels.size(); }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * dim, dim};
    }
    void append(std::span<const double> x, int label);

    /// Throws ShapeError / InputDomainError unless the batch is non-empty,
    /// finite, and every label lies in [0, class_count).
    void validate(std::size_t class_count) const;
};

struct TrainConfig {
    double learning_rate{0.2};
    std::size_t epochs{30};
    std::size_t batch_size{32};
    std::uint64_t seed{0};

    void validate() const;
};

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
ParamVector init(std::size_t input_dim, std::span<const std::size_t> hidden_widths,
                 std::size_t class_count, std::uint64_t seed);

std::vector<double> predict_proba(const ParamVector& theta, std::span<const double> x);

struct Prediction {
    int label{0};
    double confidence{0.0};
};

/// Argmax class (lowest index on ties) and its probability.
Prediction predict(const ParamVector& theta, std::span<const double> x);

struct LossAndGrad {
    double loss{0.0};
    std::vector<double> grad;
};

/// Mean cross-entropy over the batch and its exact gradient.
LossAndGrad loss_and_grad(const ParamVector& theta, const LabeledBatch& batch);

/// Same, restricted to the listed rows.
LossAndGrad loss_and_grad(const ParamVector& theta, const LabeledBatch& batch,
                          std::span<const std::size_t> rows);

/// Gradient of -ln p(label | x) for one sample, written into `grad`
/// (overwritten). Returns the loss.
double sample_loss_and_grad(const ParamVector& theta, std::span<const double> x, int label,
                            std::span<double> grad);

double accuracy(const ParamVector& theta, const LabeledBatch& data);

/// Extra term added to the training objective.
///
/// When `proximal` is set the optimizer takes the data-gradient step first and
/// then applies `proximal(theta, step_size)`, the exact minimizer of
/// penalty + ||theta' - theta||^2 / (2 step_size). Otherwise the penalty
/// gradient is added to the data gradient.
struct Penalty {
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> add_gradient;
    std::function<void(std::span<double>, double)> proximal;
};

struct StepLog {
    std::size_t step{0};
    double data_loss{0.0};
    double penalty{0.0};
    double objective{0.0};
    std::span<const double> theta;        // parameters before the update
    std::span<const std::size_t> rows;    // mini-batch rows
};

struct TrainOptions {
    const Penalty* penalty{nullptr};
    /// When non-empty, only parameters with a true flag are updated.
    std::vector<bool> trainable;
    std::function<void(const StepLog&)> observer;
};

struct TrainResult {
    ParamVector theta;
    std::size_t updates{0};
};

/// Plain mini-batch SGD for epochs * ceil(n / batch_size) steps. Shuffling is
/// deterministic in cfg.seed.
TrainResult train(ParamVector theta, const LabeledBatch& data, const TrainConfig& cfg,
                  const TrainOptions& options = {});

}  // namespace driftguard::nn

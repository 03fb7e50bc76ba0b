#include "driftguard/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "driftguard/errors.hpp"

namespace driftguard::nn {

namespace {

// Per-sample forward/backward scratch space for one network shape.
class Network {
  public:
    explicit Network(const ParamVector& theta) : theta_(theta) {
        const auto& sizes = theta.layer_sizes;
        acts_.resize(sizes.size());
        for (std::size_t l = 0; l < sizes.size(); ++l) acts_[l].resize(sizes[l]);
        delta_.resize(*std::max_element(sizes.begin(), sizes.end()));
        delta_prev_.resize(delta_.size());
    }

    // Fills acts_ and returns log-probabilities in acts_.back().
    std::span<const double> forward(std::span<const double> x) {
        if (x.size() != theta_.input_dim()) {
            throw ShapeError("feature vector has length " + std::to_string(x.size()) +
                             ", model expects " + std::to_string(theta_.input_dim()));
        }
        std::copy(x.begin(), x.end(), acts_[0].begin());
        const std::size_t layers = theta_.layer_count();
        for (std::size_t l = 0; l < layers; ++l) {
            const std::size_t fan_in = theta_.layer_sizes[l];
            const std::size_t fan_out = theta_.layer_sizes[l + 1];
            const double* w = theta_.values.data() + theta_.layer_offset(l);
            const double* b = w + fan_in * fan_out;
            const auto& in = acts_[l];
            auto& out = acts_[l + 1];
            const bool hidden = (l + 1 < layers);
            for (std::size_t o = 0; o < fan_out; ++o) {
                double z = b[o];
                const double* wr = w + o * fan_in;
                for (std::size_t i = 0; i < fan_in; ++i) z += wr[i] * in[i];
                out[o] = hidden ? std::tanh(z) : z;
                if (!std::isfinite(out[o])) {
                    throw NumericError("non-finite activation in layer " + std::to_string(l),
                                       static_cast<int>(l));
                }
            }
        }
        // log-softmax with max shift
        auto& logits = acts_.back();
        const double mx = *std::max_element(logits.begin(), logits.end());
        double sum = 0.0;
        for (double z : logits) sum += std::exp(z - mx);
        const double lse = mx + std::log(sum);
        for (double& z : logits) z -= lse;
        return logits;
    }

    // Requires a preceding forward(); accumulates d(-ln p_label)/d(theta) into grad.
    void backward(int label, std::span<double> grad) {
        const std::size_t layers = theta_.layer_count();
        const auto& logp = acts_.back();
        const std::size_t classes = logp.size();
        for (std::size_t c = 0; c < classes; ++c) {
            delta_[c] = std::exp(logp[c]) - (static_cast<int>(c) == label ? 1.0 : 0.0);
        }
        for (std::size_t l = layers; l-- > 0;) {
            const std::size_t fan_in = theta_.layer_sizes[l];
            const std::size_t fan_out = theta_.layer_sizes[l + 1];
            const std::size_t off = theta_.layer_offset(l);
            const double* w = theta_.values.data() + off;
            double* gw = grad.data() + off;
            double* gb = gw + fan_in * fan_out;
            const auto& in = acts_[l];
            for (std::size_t o = 0; o < fan_out; ++o) {
                const double d = delta_[o];
                double* gr = gw + o * fan_in;
                for (std::size_t i = 0; i < fan_in; ++i) gr[i] += d * in[i];
                gb[o] += d;
            }
            if (l == 0) break;
            for (std::size_t i = 0; i < fan_in; ++i) {
                double s = 0.0;
                for (std::size_t o = 0; o < fan_out; ++o) s += w[o * fan_in + i] * delta_[o];
                delta_prev_[i] = s * (1.0 - in[i] * in[i]);
            }
            for (std::size_t i = 0; i < fan_in; ++i) {
                if (!std::isfinite(delta_prev_[i])) {
                    throw NumericError("non-finite gradient in layer " + std::to_string(l - 1),
                                       static_cast<int>(l - 1));
                }
            }
            std::swap(delta_, delta_prev_);
        }
    }

  private:
    const ParamVector& theta_;
    std::vector<std::vector<double>> acts_;
    std::vector<double> delta_;
    std::vector<double> delta_prev_;
};

void check_batch_for(const ParamVector& theta, const LabeledBatch& batch) {
    if (batch.dim != theta.input_dim()) {
        throw ShapeError("batch feature dimension " + std::to_string(batch.dim) +
                         " does not match model input " + std::to_string(theta.input_dim()));
    }
    batch.validate(theta.class_count());
}

}  // namespace

std::size_t parameter_count(std::span<const std::size_t> layer_sizes) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        n += (layer_sizes[l] + 1) * layer_sizes[l + 1];
    }
    return n;
}

std::size_t ParamVector::layer_offset(std::size_t l) const {
    return parameter_count(std::span<const std::size_t>(layer_sizes.data(), l + 1));
}

std::pair<std::size_t, std::size_t> ParamVector::output_layer_range() const {
    return {layer_offset(layer_count() - 1), values.size()};
}

void ParamVector::validate() const {
    if (layer_sizes.size() < 2) throw ShapeError("network needs at least input and output sizes");
    if (values.size() != parameter_count(layer_sizes)) {
        throw ShapeError("parameter vector has " + std::to_string(values.size()) +
                         " entries, shapes require " +
                         std::to_string(parameter_count(layer_sizes)));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw NumericError("non-finite parameter", -1);
    }
}

void LabeledBatch::append(std::span<const double> x, int label) {
    if (x.size() != dim) throw ShapeError("appended row has the wrong dimension");
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(label);
}

void LabeledBatch::validate(std::size_t class_count) const {
    if (labels.empty()) throw InsufficientDataError("batch is empty");
    if (features.size() != labels.size() * dim) {
        throw ShapeError("feature matrix size does not match rows x dim");
    }
    for (double v : features) {
        if (!std::isfinite(v)) throw InputDomainError("batch contains a non-finite feature");
    }
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= class_count) {
            throw InputDomainError("label " + std::to_string(y) + " outside [0, " +
                                   std::to_string(class_count) + ")");
        }
    }
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
        throw ConfigError("learning_rate must lie in (0, 1]");
    }
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
}

ParamVector init(std::size_t input_dim, std::span<const std::size_t> hidden_widths,
                 std::size_t class_count, std::uint64_t seed) {
    if (input_dim < 1) throw ConfigError("input_dim must be at least 1");
    if (class_count < 2) throw ConfigError("class_count must be at least 2");
    ParamVector theta;
    theta.layer_sizes.push_back(input_dim);
    for (std::size_t h : hidden_widths) {
        if (h < 1) throw ConfigError("hidden widths must be at least 1");
        theta.layer_sizes.push_back(h);
    }
    theta.layer_sizes.push_back(class_count);
    theta.values.assign(parameter_count(theta.layer_sizes), 0.0);

    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < theta.layer_count(); ++l) {
        const std::size_t fan_in = theta.layer_sizes[l];
        const std::size_t fan_out = theta.layer_sizes[l + 1];
        const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-limit, limit);
        const std::size_t off = theta.layer_offset(l);
        for (std::size_t j = 0; j < fan_in * fan_out; ++j) theta.values[off + j] = dist(rng);
    }
    return theta;
}

std::vector<double> predict_proba(const ParamVector& theta, std::span<const double> x) {
    Network net(theta);
    const auto logp = net.forward(x);
    std::vector<double> p(logp.size());
    std::transform(logp.begin(), logp.end(), p.begin(), [](double v) { return std::exp(v); });
    return p;
}

Prediction predict(const ParamVector& theta, std::span<const double> x) {
    Network net(theta);
    const auto logp = net.forward(x);
    // max_element returns the first maximum, so ties go to the lowest index.
    const auto it = std::max_element(logp.begin(), logp.end());
    return {static_cast<int>(it - logp.begin()), std::exp(*it)};
}

double sample_loss_and_grad(const ParamVector& theta, std::span<const double> x, int label,
                            std::span<double> grad) {
    if (grad.size() != theta.size()) throw ShapeError("gradient buffer has the wrong length");
    std::fill(grad.begin(), grad.end(), 0.0);
    Network net(theta);
    const double loss = -net.forward(x)[static_cast<std::size_t>(label)];
    net.backward(label, grad);
    return loss;
}

LossAndGrad loss_and_grad(const ParamVector& theta, const LabeledBatch& batch,
                          std::span<const std::size_t> rows) {
    if (rows.empty()) throw InsufficientDataError("loss over zero rows");
    LossAndGrad out;
    out.grad.assign(theta.size(), 0.0);
    Network net(theta);
    double total = 0.0;
    for (std::size_t r : rows) {
        const int y = batch.labels[r];
        total -= net.forward(batch.row(r))[static_cast<std::size_t>(y)];
        net.backward(y, out.grad);
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    out.loss = total * inv;
    for (double& g : out.grad) g *= inv;
    if (!std::isfinite(out.loss)) {
        throw NumericError("non-finite loss at the output layer",
                           static_cast<int>(theta.layer_count() - 1));
    }
    return out;
}

LossAndGrad loss_and_grad(const ParamVector& theta, const LabeledBatch& batch) {
    check_batch_for(theta, batch);
    std::vector<std::size_t> rows(batch.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return loss_and_grad(theta, batch, rows);
}

double accuracy(const ParamVector& theta, const LabeledBatch& data) {
    check_batch_for(theta, data);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
        if (predict(theta, data.row(r)).label == data.labels[r]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.rows());
}

TrainResult train(ParamVector theta, const LabeledBatch& data, const TrainConfig& cfg,
                  const TrainOptions& options) {
    cfg.validate();
    theta.validate();
    check_batch_for(theta, data);
    if (!options.trainable.empty() && options.trainable.size() != theta.size()) {
        throw ShapeError("trainable mask length does not match the parameter vector");
    }
    const Penalty* penalty = options.penalty;
    const bool masked = !options.trainable.empty();

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});

    const double lr = cfg.learning_rate;
    std::vector<double> before;
    std::size_t updates = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            const std::span<const std::size_t> rows(order.data() + start, stop - start);
            auto lg = loss_and_grad(theta, data, rows);

            if (options.observer) {
                StepLog log;
                log.step = updates;
                log.data_loss = lg.loss;
                log.penalty = penalty ? penalty->value(theta.values) : 0.0;
                log.objective = log.data_loss + log.penalty;
                log.theta = theta.values;
                log.rows = rows;
                options.observer(log);
            }

            const bool use_prox = penalty && static_cast<bool>(penalty->proximal);
            if (penalty && !use_prox) penalty->add_gradient(theta.values, lg.grad);
            if (masked) before = theta.values;

            for (std::size_t j = 0; j < theta.size(); ++j) theta.values[j] -= lr * lg.grad[j];
            if (use_prox) penalty->proximal(theta.values, lr);
            if (masked) {
                for (std::size_t j = 0; j < theta.size(); ++j) {
                    if (!options.trainable[j]) theta.values[j] = before[j];
                }
            }
            ++updates;
        }
    }
    return {std::move(theta), updates};
}

}  // namespace driftguard::nn

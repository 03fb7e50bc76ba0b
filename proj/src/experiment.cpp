#include "driftguard/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <string>

#include "driftguard/errors.hpp"

namespace driftguard::experiment {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kInitSalt = 0x100;
constexpr std::uint64_t kTrainSalt = 0x200;
constexpr std::uint64_t kFisherSalt = 0x300;

// The adaptation step is the only part that differs between methods.
class Learner {
  public:
    virtual ~Learner() = default;

    const nn::ParamVector& theta() const { return theta_; }

    std::size_t initialize(const ExperimentConfig& cfg, const nn::LabeledBatch& data) {
        theta_ = nn::init(cfg.stream.feature_dim, cfg.hidden_widths, cfg.stream.class_count,
                          mix_seed(cfg.seed, kInitSalt));
        auto tc = cfg.training;
        tc.seed = mix_seed(cfg.seed, kTrainSalt);
        auto trained = nn::train(theta_, data, tc);
        theta_ = std::move(trained.theta);
        on_initialized(cfg, data);
        return trained.updates;
    }

    /// `event` counts adaptations from 1.
    virtual std::size_t adapt(const ExperimentConfig& cfg, const nn::LabeledBatch& data,
                              std::size_t event) = 0;

  protected:
    virtual void on_initialized(const ExperimentConfig&, const nn::LabeledBatch&) {}

    nn::TrainConfig train_config(const ExperimentConfig& cfg, std::size_t event) const {
        auto tc = cfg.training;
        tc.epochs = cfg.adaptation_epochs;
        tc.seed = mix_seed(cfg.seed, kTrainSalt + event);
        return tc;
    }

    nn::ParamVector theta_;
};

class DawcLearner final : public Learner {
  public:
    std::size_t adapt(const ExperimentConfig& cfg, const nn::LabeledBatch& data,
                      std::size_t event) override {
        auto cc = cfg.consolidation;
        cc.seed = mix_seed(cfg.seed, kFisherSalt + event);
        auto result = ewc::fine_tune_dawc(theta_, snapshots_, data, train_config(cfg, event), cc);
        theta_ = std::move(result.theta);
        snapshots_.push_back(std::move(result.snapshot));
        return result.updates;
    }

  private:
    void on_initialized(const ExperimentConfig& cfg, const nn::LabeledBatch& data) override {
        auto cc = cfg.consolidation;
        cc.seed = mix_seed(cfg.seed, kFisherSalt);
        snapshots_.push_back(ewc::make_snapshot(theta_, data, cc, 0));
    }

    std::vector<ewc::TaskSnapshot> snapshots_;
};

class StlLearner final : public Learner {
  public:
    std::size_t adapt(const ExperimentConfig& cfg, const nn::LabeledBatch& data,
                      std::size_t event) override {
        auto fresh = nn::init(cfg.stream.feature_dim, cfg.hidden_widths, cfg.stream.class_count,
                              mix_seed(cfg.seed, kInitSalt + event));
        auto trained = nn::train(std::move(fresh), data, train_config(cfg, event));
        theta_ = std::move(trained.theta);
        return trained.updates;
    }
};

class FcbLearner final : public Learner {
  public:
    std::size_t adapt(const ExperimentConfig& cfg, const nn::LabeledBatch& data,
                      std::size_t event) override {
        nn::TrainOptions options;
        options.trainable.assign(theta_.size(), false);
        const auto [begin, end] = theta_.output_layer_range();
        std::fill(options.trainable.begin() + static_cast<std::ptrdiff_t>(begin),
                  options.trainable.begin() + static_cast<std::ptrdiff_t>(end), true);
        auto trained = nn::train(theta_, data, train_config(cfg, event), options);
        theta_ = std::move(trained.theta);
        return trained.updates;
    }
};

std::unique_ptr<Learner> make_learner(Method m) {
    switch (m) {
        case Method::Dawc: return std::make_unique<DawcLearner>();
        case Method::Stl: return std::make_unique<StlLearner>();
        case Method::Fcb: return std::make_unique<FcbLearner>();
    }
    throw ConfigError("unknown method");
}

// Evaluation data for one learned task.
struct TaskEval {
    int ground_truth{-1};
    nn::LabeledBatch test;
};

int majority_task(std::span<const stream::StreamSample> samples) {
    std::map<int, std::size_t> counts;
    for (const auto& s : samples) ++counts[s.task_id];
    int best = -1;
    std::size_t best_count = 0;
    for (const auto& [task, count] : counts) {
        if (count > best_count) {
            best = task;
            best_count = count;
        }
    }
    return best;
}

RunReport run_with(const ExperimentConfig& cfg, Learner& learner) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();

    RunReport report;
    report.config = cfg;

    auto stream_cfg = cfg.stream;
    stream_cfg.seed = cfg.seed;
    const bool synthetic = !cfg.csv_path.has_value();
    const auto samples = synthetic ? stream::make_stream(stream_cfg)
                                   : stream::ingest_csv(*cfg.csv_path, stream_cfg.feature_dim,
                                                        stream_cfg.class_count);
    std::vector<nn::LabeledBatch> task_tests;
    if (synthetic) task_tests = stream::make_test_sets(stream_cfg, cfg.test_samples_per_task);
    report.evaluation = synthetic ? "held_out_tasks" : "buffer_holdout";

    const std::span<const stream::StreamSample> all(samples);
    std::vector<TaskEval> learned;

    // Splits a labeled buffer into training rows and this task's evaluation set.
    auto take_buffer = [&](std::size_t begin, std::size_t end) {
        const auto chunk = all.subspan(begin, end - begin);
        TaskEval eval;
        nn::LabeledBatch train_rows;
        if (synthetic) {
            eval.ground_truth = majority_task(chunk);
            eval.test = task_tests.at(static_cast<std::size_t>(eval.ground_truth));
            train_rows = stream::to_batch(chunk, stream_cfg.feature_dim);
        } else {
            eval.ground_truth = majority_task(chunk);
            std::size_t holdout = chunk.size() / 5;
            if (holdout == 0 && chunk.size() >= 2) holdout = 1;
            if (holdout == 0) {
                report.warnings.push_back("buffer at " + std::to_string(begin) +
                                          " has a single sample; evaluating on training data");
                train_rows = stream::to_batch(chunk, stream_cfg.feature_dim);
                eval.test = train_rows;
            } else {
                const std::size_t cut = chunk.size() - holdout;
                train_rows = stream::to_batch(chunk.first(cut), stream_cfg.feature_dim);
                eval.test = stream::to_batch(chunk.subspan(cut), stream_cfg.feature_dim);
            }
        }
        learned.push_back(std::move(eval));
        report.task_map.push_back(learned.back().ground_truth);
        report.cost.labeled_samples += end - begin;
        return train_rows;
    };

    auto record_row = [&] {
        const std::size_t t = learned.size();
        for (std::size_t i = 1; i <= t; ++i) {
            report.accuracy.record(t, i, nn::accuracy(learner.theta(), learned[i - 1].test));
        }
    };

    if (samples.empty()) throw InsufficientDataError("stream contains no samples");
    std::size_t pos = std::min(cfg.adaptation_buffer_size, samples.size());
    if (pos < cfg.adaptation_buffer_size) {
        report.warnings.push_back("stream shorter than the initial training buffer");
    }
    report.cost.gradient_updates += learner.initialize(cfg, take_buffer(0, pos));
    record_row();

    drift::DriftDetector detector(cfg.detector);
    while (pos < samples.size()) {
        const auto pred = nn::predict(learner.theta(), samples[pos].features);
        const auto drift = detector.step(pred.label, pred.confidence);
        if (!drift) {
            ++pos;
            continue;
        }

        DriftEvent ev;
        ev.stream_position = pos;
        ev.score_sf = drift->score_sf;
        ev.threshold = drift->threshold_th;
        if (drift->change_index) {
            const std::size_t window_start = pos + 1 - drift->window_len;
            ev.estimated_change_position = window_start + *drift->change_index;
        }
        ev.buffer_begin = pos + 1;
        ev.buffer_end = std::min(samples.size(), ev.buffer_begin + cfg.adaptation_buffer_size);
        pos = ev.buffer_end;

        if (ev.buffer_end == ev.buffer_begin) {
            report.warnings.push_back("drift at stream position " +
                                      std::to_string(ev.stream_position) +
                                      " left no samples to adapt on");
            report.drift_events.push_back(ev);
            break;
        }
        if (ev.buffer_end - ev.buffer_begin < cfg.adaptation_buffer_size) {
            report.warnings.push_back("truncated adaptation buffer after drift at " +
                                      std::to_string(ev.stream_position) + ": " +
                                      std::to_string(ev.buffer_end - ev.buffer_begin) +
                                      " samples");
        }
        const auto batch = take_buffer(ev.buffer_begin, ev.buffer_end);
        ev.updates = learner.adapt(cfg, batch, report.drift_events.size() + 1);
        report.cost.gradient_updates += ev.updates;
        ++report.cost.fine_tune_events;
        report.drift_events.push_back(ev);
        record_row();
        detector.reset();
    }
    report.cost.detector_invocations = detector.invocations();

    const std::size_t T = report.accuracy.rows();
    report.aa = metrics::average_accuracy(report.accuracy, T);
    report.af = metrics::average_forgetting(report.accuracy, T);
    if (cfg.record_wall_time) {
        report.wall_time_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - started)
                                  .count();
    }
    return report;
}

RunReport run_method(const ExperimentConfig& cfg, Method expected) {
    if (cfg.method != expected) {
        throw ConfigError("config requests method " + std::string(to_string(cfg.method)) +
                          ", runner is " + std::string(to_string(expected)));
    }
    auto learner = make_learner(expected);
    return run_with(cfg, *learner);
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Dawc: return "dawc";
        case Method::Stl: return "stl";
        case Method::Fcb: return "fcb";
    }
    return "dawc";
}

Method method_from_string(std::string_view name) {
    if (name == "dawc") return Method::Dawc;
    if (name == "stl") return Method::Stl;
    if (name == "fcb") return Method::Fcb;
    throw ConfigError("unknown method '" + std::string(name) + "' (expected dawc, stl or fcb)");
}

void ExperimentConfig::validate() const {
    detector.validate();
    consolidation.validate();
    training.validate();
    stream.validate();
    for (std::size_t h : hidden_widths) {
        if (h < 1) throw ConfigError("hidden widths must be positive");
    }
    if (adaptation_buffer_size < 1) throw ConfigError("adaptation_buffer_size must be positive");
    if (adaptation_epochs < 1) throw ConfigError("adaptation_epochs must be positive");
    if (!csv_path && test_samples_per_task < 1) {
        throw ConfigError("test_samples_per_task must be positive");
    }
}

RunReport run_dawc(const ExperimentConfig& cfg) { return run_method(cfg, Method::Dawc); }
RunReport run_stl(const ExperimentConfig& cfg) { return run_method(cfg, Method::Stl); }
RunReport run_fcb(const ExperimentConfig& cfg) { return run_method(cfg, Method::Fcb); }

RunReport run(const ExperimentConfig& cfg) {
    switch (cfg.method) {
        case Method::Dawc: return run_dawc(cfg);
        case Method::Stl: return run_stl(cfg);
        case Method::Fcb: return run_fcb(cfg);
    }
    throw ConfigError("unknown method");
}

}  // namespace driftguard::experiment

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driftguard/classifier.hpp"
#include "driftguard/consolidation.hpp"
#include "driftguard/drift_detector.hpp"
#include "driftguard/metrics.hpp"
#include "driftguard/stream_gen.hpp"

namespace driftguard::experiment {

/// dawc: consolidation fine-tune. stl: fresh model per task. fcb: only the
/// output layer is retrained after the first task.
enum class Method { Dawc, Stl, Fcb };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

struct ExperimentConfig {
    Method method{Method::Dawc};
    std::uint64_t seed{0};
    drift::DetectorConfig detector;
    ewc::ConsolidationConfig consolidation;
    nn::TrainConfig training;
    std::vector<std::size_t> hidden_widths{32, 32};
    /// Synthetic stream description; feature_dim and class_count also apply
    /// to CSV input.
    stream::TaskSequenceConfig stream{stream::default_benchmark()};
    /// When set, samples are read from this CSV instead of being generated.
    std::optional<std::string> csv_path;
    std::size_t adaptation_buffer_size{200};
    /// Epochs for training after a drift; training.epochs covers the
    /// initial buffer.
    std::size_t adaptation_epochs{5};
    std::size_t test_samples_per_task{250};
    /// Wall-clock timing makes reports non-reproducible, so it is opt-in.
    bool record_wall_time{false};

    void validate() const;
};

struct DriftEvent {
    std::size_t stream_position{0};
    std::optional<std::size_t> estimated_change_position;
    double score_sf{0.0};
    double threshold{0.0};
    /// Labeled samples [buffer_begin, buffer_end) consumed for adaptation.
    std::size_t buffer_begin{0};
    std::size_t buffer_end{0};
    std::size_t updates{0};
};

struct RunReport {
    ExperimentConfig config;
    std::vector<DriftEvent> drift_events;
    metrics::AccuracyMatrix accuracy;
    /// Ground-truth task evaluated for each learned task (-1 for CSV input
    /// without task ids).
    std::vector<int> task_map;
    /// "held_out_tasks" for synthetic streams, "buffer_holdout" for CSV.
    std::string evaluation;
    double aa{0.0};
    double af{0.0};
    metrics::CostLedger cost;
    std::vector<std::string> warnings;
    std::optional<double> wall_time_ms;
};

RunReport run_dawc(const ExperimentConfig& cfg);
RunReport run_stl(const ExperimentConfig& cfg);
RunReport run_fcb(const ExperimentConfig& cfg);

/// Dispatches on cfg.method.
RunReport run(const ExperimentConfig& cfg);

}  // namespace driftguard::experiment

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "driftguard/classifier.hpp"

namespace driftguard::stream {

enum class DriftKind { Rotate, Translate, Scale };

std::string_view to_string(DriftKind kind);
DriftKind drift_kind_from_string(std::string_view name);

/// Geometric covariate shift applied to every class mean between two tasks.
/// Rotate: radians in the plane of the first two axes. Translate: length of
/// a seeded random offset. Scale: multiplicative factor on every mean.
struct DriftSpec {
    DriftKind kind{DriftKind::Rotate};
    double magnitude{0.0};

    void validate() const;
};

struct TaskSequenceConfig {
    std::size_t class_count{10};
    std::size_t feature_dim{2};
    std::size_t samples_per_task{1000};
    std::size_t task_count{4};
    std::vector<DriftSpec> drift_between_tasks;
    double class_noise_sigma{0.25};
    std::uint64_t seed{0};

    void validate() const;
};

/// Default benchmark: four tasks, each a further rotation of the previous.
TaskSequenceConfig default_benchmark(std::uint64_t seed = 0);

struct StreamSample {
    std::vector<double> features;
    int label{0};
    int task_id{-1};  // -1 when ground truth is unknown
    std::size_t stream_index{0};
};

/// Class means per task: [task][class][dim]. Task 0 places the means on a
/// circle (hypersphere when dim > 2) of radius 3; later tasks apply the drifts.
std::vector<std::vector<std::vector<double>>> task_means(const TaskSequenceConfig& cfg);

/// Ground-truth change points: every multiple of samples_per_task after 0.
std::vector<std::size_t> change_points(const TaskSequenceConfig& cfg);

/// Stratified Gaussian samples around the task means, task after task, each
/// task shuffled. Deterministic in cfg.seed.
std::vector<StreamSample> make_stream(const TaskSequenceConfig& cfg);

/// Held-out sets drawn from the same per-task distributions as the stream,
/// from an independent random stream.
std::vector<nn::LabeledBatch> make_test_sets(const TaskSequenceConfig& cfg,
                                             std::size_t samples_per_task);

/// Reads `f0,...,f{d-1},label[,task_id]` rows. Throws ParseError with the
/// 1-based line number on malformed input and InputDomainError for labels
/// outside [0, class_count).
std::vector<StreamSample> ingest_csv(const std::filesystem::path& path, std::size_t feature_dim,
                                     std::size_t class_count);

/// Copies the features and labels of a range of samples into a batch.
nn::LabeledBatch to_batch(std::span<const StreamSample> samples, std::size_t feature_dim);

}  // namespace driftguard::stream

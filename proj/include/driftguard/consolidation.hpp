#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "driftguard/classifier.hpp"

namespace driftguard::ewc {

/// Which label the per-sample score is taken against when estimating Fisher
/// information: the dataset label, or a label drawn from the model's own
/// predictive distribution.
enum class FisherMode { EmpiricalLabel, ModelSampledLabel };

std::string_view to_string(FisherMode mode);
FisherMode fisher_mode_from_string(std::string_view name);

struct ConsolidationConfig {
    double lambda_ewc{1000.0};
    std::size_t fisher_samples{512};
    FisherMode fisher_mode{FisherMode::EmpiricalLabel};
    std::uint64_t seed{0};

    void validate() const;
};

/// Anchor for one learned task: its parameters and their diagonal Fisher.
struct TaskSnapshot {
    int task_id{0};
    nn::ParamVector theta_star;
    std::vector<double> fisher_diag;

    void validate() const;
};

/// Diagonal empirical Fisher: the mean over M samples of the squared
/// per-sample gradient of -ln p(y|x, theta). Uses M distinct rows when the
/// data has at least M of them, otherwise draws M rows with replacement.
std::vector<double> estimate_fisher_diag(const nn::ParamVector& theta,
                                         const nn::LabeledBatch& data,
                                         const ConsolidationConfig& cfg);

/// (lambda/2) * sum_i sum_j F_ij (theta_j - theta*_ij)^2
double ewc_penalty(std::span<const double> theta, std::span<const TaskSnapshot> snapshots,
                   double lambda_ewc);

/// Component j: lambda * sum_i F_ij (theta_j - theta*_ij)
std::vector<double> ewc_penalty_grad(std::span<const double> theta,
                                     std::span<const TaskSnapshot> snapshots,
                                     double lambda_ewc);

/// Training hook for the consolidation term. The returned penalty keeps a
/// reference to `snapshots`, which must outlive it.
nn::Penalty make_penalty(std::span<const TaskSnapshot> snapshots, double lambda_ewc);

/// Snapshot of `theta` with Fisher information estimated on `data`.
TaskSnapshot make_snapshot(const nn::ParamVector& theta, const nn::LabeledBatch& data,
                           const ConsolidationConfig& cfg, int task_id);

struct FineTuneResult {
    nn::ParamVector theta;
    TaskSnapshot snapshot;
    std::size_t updates{0};
};

/// Trains on `new_data` under cross-entropy plus the consolidation penalty of
/// all `snapshots`, then snapshots the result. The new snapshot's id is one
/// past the largest existing id; the caller appends it.
FineTuneResult fine_tune_dawc(const nn::ParamVector& theta,
                              std::span<const TaskSnapshot> snapshots,
                              const nn::LabeledBatch& new_data, const nn::TrainConfig& train_cfg,
                              const ConsolidationConfig& cons_cfg);

}  // namespace driftguard::ewc

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace driftguard::metrics {

/// Lower-triangular matrix of a_{t,i}: accuracy on task i after finishing
/// task t. Indices are 1-based, 1 <= i <= t, and every slot is write-once.
class AccuracyMatrix {
  public:
    void record(std::size_t t, std::size_t i, double acc);

    std::optional<double> at(std::size_t t, std::size_t i) const;
    /// Number of rows that have at least one slot allocated.
    std::size_t rows() const { return rows_.size(); }
    bool row_complete(std::size_t t) const;

    /// Completed rows as plain vectors; row t has t entries.
    std::vector<std::vector<double>> to_rows() const;
    static AccuracyMatrix from_rows(const std::vector<std::vector<double>>& rows);

  private:
    std::vector<std::vector<std::optional<double>>> rows_;
};

/// Mean of row T.
double average_accuracy(const AccuracyMatrix& m, std::size_t T);

/// Mean over i < T of (best accuracy on task i at any t in [i, T-1]) minus
/// its final accuracy a_{T,i}. Zero when T == 1.
double average_forgetting(const AccuracyMatrix& m, std::size_t T);

struct CostLedger {
    std::size_t gradient_updates{0};
    std::size_t fine_tune_events{0};
    std::size_t detector_invocations{0};
    /// Samples whose ground-truth label the learner consumed.
    std::size_t labeled_samples{0};
};

}  // namespace driftguard::metrics

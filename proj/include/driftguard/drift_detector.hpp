#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace driftguard::drift {

/// Detector tuning knobs.
///
/// `lambda_sens` both gates candidate splits (target mean must fall to at most
/// (1 - lambda) times the reference mean) and sets the decision threshold
/// -ln(lambda). `delta` pads both ends of the window so each segment keeps at
/// least `delta` samples. `check_stride` is how many pushes elapse between
/// detector runs in streaming mode.
struct DetectorConfig {
    double lambda_sens{0.05};
    std::size_t delta{100};
    std::size_t n_max{1000};
    std::size_t check_stride{25};

    /// Throws ConfigError naming the violated constraint.
    void validate() const;

    /// Smallest window length accepted by test_for_drift.
    std::size_t min_window() const { return 2 * delta + 2; }
};

/// Decision threshold T_h = -ln(lambda).
double threshold_for(double lambda_sens);

struct ConfidenceEntry {
    int label{0};
    double q{0.0};
};

/// Bounded FIFO of (predicted label, clamped confidence); oldest first.
class ConfidenceWindow {
  public:
    explicit ConfidenceWindow(std::size_t capacity);

    /// Clamps q into the open unit interval and appends, evicting the oldest
    /// entry when full. Throws InputDomainError for q outside [0,1].
    void push(int label, double q);
    void clear() { entries_.clear(); }

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }
    const ConfidenceEntry& operator[](std::size_t i) const { return entries_[i]; }

    std::vector<double> confidences() const;

  private:
    std::size_t capacity_;
    std::deque<ConfidenceEntry> entries_;
};

struct DriftReport {
    bool detected{false};
    double score_sf{0.0};
    double threshold_th{0.0};
    /// Size k of the reference segment (q_1..q_k) at the best split; the
    /// first post-change sample sits at window position k (0-based).
    std::optional<std::size_t> change_index;
    std::size_t window_len{0};
};

/// Runs the sliding-window likelihood-ratio test over already-clamped
/// confidences. Throws InsufficientDataError if q.size() < cfg.min_window().
DriftReport test_for_drift(std::span<const double> q, const DetectorConfig& cfg);
DriftReport test_for_drift(const ConfidenceWindow& window, const DetectorConfig& cfg);

/// Streaming wrapper: pushes one sample at a time, runs the test every
/// `check_stride` pushes once the window is long enough, and clears the
/// window after a detection.
class DriftDetector {
  public:
    explicit DriftDetector(DetectorConfig cfg);

    std::optional<DriftReport> step(int label, double q);
    void reset();

    const ConfidenceWindow& window() const { return window_; }
    const DetectorConfig& config() const { return cfg_; }
    std::size_t invocations() const { return invocations_; }

  private:
    DetectorConfig cfg_;
    ConfidenceWindow window_;
    std::size_t pushes_since_reset_{0};
    std::size_t invocations_{0};
};

}  // namespace driftguard::drift

#include "driftguard/drift_detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftguard/beta_dist.hpp"
#include "driftguard/errors.hpp"

namespace driftguard::drift {

void DetectorConfig::validate() const {
    if (!(lambda_sens > 0.0 && lambda_sens < 1.0)) {
        throw ConfigError("lambda must lie in the open interval (0,1), got " +
                          std::to_string(lambda_sens));
    }
    if (delta < 1) throw ConfigError("delta must be a positive integer");
    if (n_max < 1) throw ConfigError("n_max must be a positive integer");
    if (2 * delta >= n_max) {
        throw ConfigError("2*delta must be smaller than n_max (delta=" + std::to_string(delta) +
                          ", n_max=" + std::to_string(n_max) + ")");
    }
    if (check_stride < 1) throw ConfigError("check_stride must be at least 1");
}

double threshold_for(double lambda_sens) { return -std::log(lambda_sens); }

ConfidenceWindow::ConfidenceWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ConfigError("window capacity must be positive");
}

void ConfidenceWindow::push(int label, double q) {
    const double clamped = beta::clamp_confidence(q);
    if (entries_.size() == capacity_) entries_.pop_front();
    entries_.push_back({label, clamped});
}

std::vector<double> ConfidenceWindow::confidences() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.q);
    return out;
}

DriftReport test_for_drift(std::span<const double> q, const DetectorConfig& cfg) {
    cfg.validate();
    const std::size_t n = q.size();
    if (n < cfg.min_window()) {
        throw InsufficientDataError("drift test needs at least " +
                                    std::to_string(cfg.min_window()) + " confidences, got " +
                                    std::to_string(n));
    }

    std::vector<double> log_q(n);
    std::vector<double> log_1mq(n);
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        log_q[i] = std::log(q[i]);
        log_1mq[i] = std::log1p(-q[i]);
        prefix[i + 1] = prefix[i] + q[i];
    }

    DriftReport report;
    report.threshold_th = threshold_for(cfg.lambda_sens);
    report.window_len = n;

    const std::span<const double> all_q(q);
    const std::span<const double> all_lq(log_q);
    const std::span<const double> all_l1q(log_1mq);

    double s_f = 0.0;
    double best_score = 0.0;
    std::optional<std::size_t> best_k;
    for (std::size_t k = cfg.delta; k <= n - cfg.delta; ++k) {
        const double m_r = prefix[k] / static_cast<double>(k);
        const double m_t = (prefix[n] - prefix[k]) / static_cast<double>(n - k);
        if (!(m_t <= (1.0 - cfg.lambda_sens) * m_r)) continue;

        const auto ref = beta::summarize(all_q.subspan(0, k), all_lq.subspan(0, k),
                                         all_l1q.subspan(0, k));
        const auto tgt = beta::summarize(all_q.subspan(k), all_lq.subspan(k),
                                         all_l1q.subspan(k));
        beta::BetaParams fit_r;
        beta::BetaParams fit_t;
        try {
            fit_r = beta::fit_mle(ref);
            fit_t = beta::fit_mle(tgt);
        } catch (const DegenerateSampleError&) {
            continue;
        } catch (const InsufficientDataError&) {
            continue;
        }

        // Sum over the target segment of ln f(q|target fit) - ln f(q|reference fit),
        // expanded through the segment's sufficient statistics.
        const double n_t = static_cast<double>(tgt.count);
        const double s_k =
            n_t * ((fit_t.alpha - fit_r.alpha) * tgt.mean_log_q +
                   (fit_t.beta - fit_r.beta) * tgt.mean_log_one_minus_q -
                   beta::log_beta_function(fit_t.alpha, fit_t.beta) +
                   beta::log_beta_function(fit_r.alpha, fit_r.beta));
        s_f = std::max(s_f, s_k);
        if (!best_k || s_k > best_score) {
            best_score = s_k;
            best_k = k;
        }
    }

    report.score_sf = s_f;
    if (s_f > 0.0) report.change_index = best_k;
    report.detected = report.score_sf > report.threshold_th;
    return report;
}

DriftReport test_for_drift(const ConfidenceWindow& window, const DetectorConfig& cfg) {
    const auto q = window.confidences();
    return test_for_drift(std::span<const double>(q), cfg);
}

DriftDetector::DriftDetector(DetectorConfig cfg) : cfg_(cfg), window_((cfg.validate(), cfg.n_max)) {}

std::optional<DriftReport> DriftDetector::step(int label, double q) {
    window_.push(label, q);
    ++pushes_since_reset_;
    if (pushes_since_reset_ % cfg_.check_stride != 0 || window_.size() < cfg_.min_window()) {
        return std::nullopt;
    }
    ++invocations_;
    auto report = test_for_drift(window_, cfg_);
    if (!report.detected) return std::nullopt;
    reset();
    return report;
}

void DriftDetector::reset() {
    window_.clear();
    pushes_since_reset_ = 0;
}

}  // namespace driftguard::drift

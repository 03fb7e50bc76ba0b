#pragma once

// Independent reference implementations used only by tests. Nothing here
// shares code paths with the library beyond its public per-sample API.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "driftguard/beta_dist.hpp"
#include "driftguard/drift_detector.hpp"
#include "driftguard/errors.hpp"

namespace oracles {

/// Beta(a, b) draw through the gamma-ratio construction.
inline double sample_beta(double a, double b, std::mt19937_64& rng) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    return x / (x + y);
}

inline std::vector<double> beta_samples(double a, double b, std::size_t n, std::mt19937_64& rng) {
    std::vector<double> out(n);
    for (auto& v : out) v = sample_beta(a, b, rng);
    return out;
}

/// Beta log-likelihood summed directly with std::lgamma.
inline double direct_log_likelihood(double a, double b, double sum_log_q, double sum_log_1mq,
                                    std::size_t n) {
    const double log_b = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    return (a - 1.0) * sum_log_q + (b - 1.0) * sum_log_1mq - static_cast<double>(n) * log_b;
}

struct GridMax {
    double alpha;
    double beta;
};

/// Exhaustive maximizer of the Beta log-likelihood on a regular grid.
inline GridMax grid_search_mle(std::span<const double> q, double lo, double hi, double step) {
    double slq = 0.0;
    double sl1q = 0.0;
    for (double v : q) {
        slq += std::log(v);
        sl1q += std::log(1.0 - v);
    }
    const auto steps = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    // lgamma tables along each axis keep the search tractable.
    std::vector<double> grid(steps + 1);
    std::vector<double> lg(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        grid[i] = lo + step * static_cast<double>(i);
        lg[i] = std::lgamma(grid[i]);
    }
    const double n = static_cast<double>(q.size());
    GridMax best{grid[0], grid[0]};
    double best_ll = -INFINITY;
    for (std::size_t i = 0; i <= steps; ++i) {
        for (std::size_t j = 0; j <= steps; ++j) {
            const double a = grid[i];
            const double b = grid[j];
            const double ll = (a - 1.0) * slq + (b - 1.0) * sl1q -
                              n * (lg[i] + lg[j] - std::lgamma(a + b));
            if (ll > best_ll) {
                best_ll = ll;
                best = {a, b};
            }
        }
    }
    return best;
}

/// Composite midpoint rule on (0,1).
inline double integrate_unit(const std::function<double(double)>& f, std::size_t panels) {
    const double h = 1.0 / static_cast<double>(panels);
    double s = 0.0;
    for (std::size_t i = 0; i < panels; ++i) s += f((static_cast<double>(i) + 0.5) * h);
    return s * h;
}

struct OracleReport {
    bool detected{false};
    double score_sf{0.0};
    std::optional<std::size_t> change_index;
};

/// Line-by-line transcription of the sliding-window detector: direct means,
/// per-split Beta fits on copied segments, and per-sample log density ratios.
inline OracleReport brute_force_detector(std::span<const double> q, double lambda,
                                         std::size_t delta) {
    namespace b = driftguard::beta;
    OracleReport out;
    const double th = -std::log(lambda);
    const std::size_t n = q.size();
    double s_f = 0.0;
    std::optional<std::size_t> arg;
    double arg_score = 0.0;
    for (std::size_t k = delta; k <= n - delta; ++k) {
        double m_r = 0.0;
        for (std::size_t i = 0; i < k; ++i) m_r += q[i];
        m_r /= static_cast<double>(k);
        double m_t = 0.0;
        for (std::size_t i = k; i < n; ++i) m_t += q[i];
        m_t /= static_cast<double>(n - k);
        if (m_t <= (1.0 - lambda) * m_r) {
            const std::vector<double> ref(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(k));
            const std::vector<double> tgt(q.begin() + static_cast<std::ptrdiff_t>(k), q.end());
            b::BetaParams fr;
            b::BetaParams ft;
            try {
                fr = b::fit_mle(ref);
                ft = b::fit_mle(tgt);
            } catch (const driftguard::DegenerateSampleError&) {
                continue;
            } catch (const driftguard::InsufficientDataError&) {
                continue;
            }
            double s_k = 0.0;
            for (std::size_t i = k; i < n; ++i) {
                s_k += b::log_pdf(ft, q[i]) - b::log_pdf(fr, q[i]);
            }
            s_f = std::max(s_f, s_k);
            if (!arg || s_k > arg_score) {
                arg = k;
                arg_score = s_k;
            }
        }
    }
    out.score_sf = s_f;
    if (s_f > 0.0) out.change_index = arg;
    out.detected = s_f > th;
    return out;
}

/// Central finite-difference gradient of f at x.
inline std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                              std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double orig = x[j];
        x[j] = orig + h;
        const double up = f(x);
        x[j] = orig - h;
        const double down = f(x);
        x[j] = orig;
        g[j] = (up - down) / (2.0 * h);
    }
    return g;
}

/// |a - b| / max(|a|, |b|, floor): relative error with an absolute floor
/// for components that are numerically zero.
inline double relative_error(double a, double b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// ||a - b|| / ||b||: relative error of a whole gradient vector.
inline double norm_relative_error(std::span<const double> a, std::span<const double> b) {
    double diff = 0.0;
    double ref = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        diff += (a[j] - b[j]) * (a[j] - b[j]);
        ref += b[j] * b[j];
    }
    return std::sqrt(diff / ref);
}

}  // namespace oracles

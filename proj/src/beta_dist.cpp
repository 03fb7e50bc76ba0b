#include "driftguard/beta_dist.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "driftguard/errors.hpp"

namespace driftguard::beta {

namespace {

constexpr std::size_t kMinFitSamples = 4;
constexpr int kMaxNewtonIterations = 50;
constexpr double kNewtonTolerance = 1e-10;

bool valid_shape(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const BetaParams& params) {
    if (!valid_shape(params.alpha) || !valid_shape(params.beta)) {
        throw ParameterDomainError("Beta shapes must be positive and finite (alpha=" +
                                   std::to_string(params.alpha) +
                                   ", beta=" + std::to_string(params.beta) + ")");
    }
}

double clamp_confidence(double q) {
    if (!std::isfinite(q) || q < 0.0 || q > 1.0) {
        throw InputDomainError("confidence must lie in [0,1], got " + std::to_string(q));
    }
    return std::clamp(q, kConfidenceEpsilon, 1.0 - kConfidenceEpsilon);
}

double log_beta_function(double a, double b) {
    return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

double log_pdf(const BetaParams& params, double q) {
    validate(params);
    if (!(q > 0.0 && q < 1.0)) {
        throw InputDomainError("Beta density requires q in (0,1), got " + std::to_string(q));
    }
    return (params.alpha - 1.0) * std::log(q) + (params.beta - 1.0) * std::log1p(-q) -
           log_beta_function(params.alpha, params.beta);
}

SampleStats summarize(std::span<const double> q,
                      std::span<const double> log_q,
                      std::span<const double> log_one_minus_q) {
    if (q.size() != log_q.size() || q.size() != log_one_minus_q.size()) {
        throw ShapeError("summarize: sample and log arrays differ in length");
    }
    SampleStats s;
    s.count = q.size();
    if (q.empty()) {
        s.degenerate = true;
        return s;
    }
    const double n = static_cast<double>(q.size());

    double sum = 0.0;
    double sum_log = 0.0;
    double sum_log1m = 0.0;
    double lo = q[0];
    double hi = q[0];
    for (std::size_t i = 0; i < q.size(); ++i) {
        sum += q[i];
        sum_log += log_q[i];
        sum_log1m += log_one_minus_q[i];
        lo = std::min(lo, q[i]);
        hi = std::max(hi, q[i]);
    }
    s.mean = sum / n;
    double ss = 0.0;
    for (double v : q) {
        const double d = v - s.mean;
        ss += d * d;
    }
    s.variance = ss / n;
    s.mean_log_q = sum_log / n;
    s.mean_log_one_minus_q = sum_log1m / n;
    s.degenerate = (lo == hi);
    return s;
}

SampleStats summarize(std::span<const double> samples) {
    std::vector<double> q(samples.size());
    std::vector<double> lq(samples.size());
    std::vector<double> l1q(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        q[i] = clamp_confidence(samples[i]);
        lq[i] = std::log(q[i]);
        l1q[i] = std::log1p(-q[i]);
    }
    return summarize(q, lq, l1q);
}

BetaParams moments_estimate(const SampleStats& stats) {
    if (stats.degenerate || !(stats.variance > 0.0)) {
        throw DegenerateSampleError("cannot fit a Beta distribution to a zero-variance sample");
    }
    const double m = stats.mean;
    // Population variance of data in (0,1) is below m(1-m), so the common
    // factor is positive except for rounding at the extremes.
    const double common = std::max(m * (1.0 - m) / stats.variance - 1.0, 1e-6);
    return {m * common, (1.0 - m) * common};
}

double log_likelihood(const BetaParams& params, const SampleStats& stats) {
    const double n = static_cast<double>(stats.count);
    return n * ((params.alpha - 1.0) * stats.mean_log_q +
                (params.beta - 1.0) * stats.mean_log_one_minus_q -
                log_beta_function(params.alpha, params.beta));
}

BetaParams fit_mle(const SampleStats& stats) {
    if (stats.count < kMinFitSamples) {
        throw InsufficientDataError("Beta fit needs at least 4 samples, got " +
                                    std::to_string(stats.count));
    }
    const BetaParams start = moments_estimate(stats);

    using boost::math::digamma;
    using boost::math::trigamma;

    double a = start.alpha;
    double b = start.beta;
    bool converged = false;
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
        const double psi_ab = digamma(a + b);
        const double g1 = digamma(a) - psi_ab - stats.mean_log_q;
        const double g2 = digamma(b) - psi_ab - stats.mean_log_one_minus_q;

        const double t_ab = trigamma(a + b);
        const double j11 = trigamma(a) - t_ab;
        const double j22 = trigamma(b) - t_ab;
        const double j12 = -t_ab;
        const double det = j11 * j22 - j12 * j12;
        if (!std::isfinite(det) || det == 0.0) break;

        const double da = (j22 * g1 - j12 * g2) / det;
        const double db = (j11 * g2 - j12 * g1) / det;
        a -= da;
        b -= db;
        if (!valid_shape(a) || !valid_shape(b)) break;
        if (std::abs(da) < kNewtonTolerance && std::abs(db) < kNewtonTolerance) {
            converged = true;
            break;
        }
    }
    if (!converged || !valid_shape(a) || !valid_shape(b)) return start;

    const BetaParams refined{a, b};
    if (log_likelihood(refined, stats) < log_likelihood(start, stats)) return start;
    return refined;
}

BetaParams fit_mle(std::span<const double> samples) { return fit_mle(summarize(samples)); }

}  // namespace driftguard::beta

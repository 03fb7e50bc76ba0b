#pragma once

#include <cstddef>
#include <span>

namespace driftguard::beta {

/// Confidences of exactly 0 or 1 are pulled into the open interval by this margin.
inline constexpr double kConfidenceEpsilon = 1e-6;

/// Shape parameters of a Beta distribution. Both must be positive and finite.
struct BetaParams {
    double alpha{1.0};
    double beta{1.0};

    friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

/// Throws ParameterDomainError unless both shapes are positive and finite.
void validate(const BetaParams& params);

/// Maps a raw confidence in [0,1] into [eps, 1-eps]. Throws InputDomainError
/// for values outside [0,1] or non-finite values.
double clamp_confidence(double q);

/// ln B(a, b) via log-gamma.
double log_beta_function(double a, double b);

/// Natural-log density of Beta(alpha, beta) at q, with q in (0,1).
double log_pdf(const BetaParams& params, double q);

/// Sufficient statistics of a confidence sample for Beta maximum likelihood,
/// plus the first two moments used to warm-start the fit.
struct SampleStats {
    std::size_t count{0};
    double mean{0.0};
    double variance{0.0};  // population variance (divides by count)
    double mean_log_q{0.0};
    double mean_log_one_minus_q{0.0};
    bool degenerate{false};  // every sample identical
};

/// Summarizes raw samples; each value is clamped first.
SampleStats summarize(std::span<const double> samples);

/// Summarizes already-clamped samples whose logarithms were precomputed.
/// Produces bit-identical results to summarize(samples) for the same values.
SampleStats summarize(std::span<const double> q,
                      std::span<const double> log_q,
                      std::span<const double> log_one_minus_q);

/// Method-of-moments estimate. Throws DegenerateSampleError for zero spread.
BetaParams moments_estimate(const SampleStats& stats);

/// Maximum-likelihood fit. Newton iterations on the two digamma score
/// equations, started from the moments estimate; falls back to the moments
/// estimate when Newton fails to converge within 50 iterations, leaves the
/// positive quadrant, or ends at a lower likelihood.
///
/// Throws InsufficientDataError for fewer than 4 samples and
/// DegenerateSampleError when all samples coincide.
BetaParams fit_mle(const SampleStats& stats);
BetaParams fit_mle(std::span<const double> samples);

/// Sample log-likelihood evaluated from sufficient statistics.
double log_likelihood(const BetaParams& params, const SampleStats& stats);

}  // namespace driftguard::beta

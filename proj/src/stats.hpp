#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fpp {

/// Monte-Carlo mean with standard error and seed provenance.
struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t replicas = 0;
    std::uint64_t master_seed = 0;
    std::string stream;

    double lo95() const { return mean - 1.959963984540054 * stderr_; }
    double hi95() const { return mean + 1.959963984540054 * stderr_; }
};

/// mean = sample mean, stderr = sample standard deviation / sqrt(n).
Estimate mean_estimate(std::span<const double> xs);

/// Proportion with Wilson 95% interval; the right tool for small one-arm
/// probabilities where the normal interval collapses.
struct Proportion {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;

    double point() const;
    double lo95() const;
    double hi95() const;
    /// Normal-approximation standard error, for combining estimates.
    double stderr_() const;
};

struct FitPoint {
    double x = 0.0;      // abscissa (scale, radius, ...)
    double p = 0.0;      // probability in (0,1)
    double trials = 0;   // replica count behind p, sets the WLS weight
};

/// Weighted least-squares slope of -log p against log x, weights from the
/// delta-method variance of log p-hat. Window is [lo, hi] inclusive.
/// Throws when the window has < 3 points or touches p in {0,1}.
Estimate fit_exponent(std::span<const FitPoint> curve, std::size_t lo, std::size_t hi);

}  // namespace fpp

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "grid.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace fpp {

/// Stationary covariance kernel, radial (kappa(x) = kappa(|x|)), normalized
/// so kappa(0) = 1. Symmetry kappa(x) = kappa(-x) is structural.
struct KernelSpec {
    enum class Kind { kGaussian, kDelta, kTabulated };
    Kind kind = Kind::kGaussian;
    double length_scale = 1.0;
    /// Tabulated: (r, value) samples, linearly interpolated, zero beyond the
    /// last radius. Values are divided by the r=0 entry.
    std::vector<std::pair<double, double>> table;

    void validate() const;
    double value(double r) const;
};

// ---- Bargmann-Fock series sampler ----------------------------------------

/// Tail variance of the truncated series at distance r from the origin:
/// exp(-r^2) * sum_{k>N} r^{2k}/k!.
double truncation_tail(int truncation, double radius);

/// Minimal N whose tail variance at `radius` is below `tol`.
int required_truncation(double radius, double tol);

/// Largest distance from the origin to a grid corner; the series truncation
/// must be admissible there.
double worst_corner_radius(const GridSpec& g);

/// f(x) = exp(-|x|^2/2) sum_{i+j<=N} a_ij x1^i x2^j / sqrt(i! j!) with a_ij
/// i.i.d. standard normal draws from the stream. 2D only. Throws (naming the
/// required N) when `truncation` is below the tail-bound requirement for the
/// grid at tolerance `tol`.
ScalarField sample_bargmann_fock(const GridSpec& g, int truncation, const RngSeed& seed,
                                 double tol = 1e-6);

// ---- circulant-embedding spectral sampler ---------------------------------

struct EmbeddingInfo {
    std::array<std::int64_t, 3> torus{1, 1, 1};
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
};

/// Torus size and eigenvalue range of the circulant embedding that
/// sample_stationary_spectral would use (padding factor >= 2).
EmbeddingInfo spectral_embedding_info(const GridSpec& g, const KernelSpec& kernel);

/// Stationary centered Gaussian field with covariance `kernel` via circulant
/// embedding. Eigenvalues in [-1e-10, 0) are clipped to zero; anything below
/// that is a hard error reporting the worst eigenvalue and a suggested
/// padding factor.
ScalarField sample_stationary_spectral(const GridSpec& g, const KernelSpec& kernel,
                                       const RngSeed& seed);

/// Cross-replica estimate of E[f(x) f(x + lag*h)], averaged over all node
/// pairs within each replica; the standard error comes from the replica
/// spread. Needs at least two replicas.
Estimate empirical_covariance(std::span<const ScalarField> fields,
                              std::span<const std::int64_t> lag);

}  // namespace fpp

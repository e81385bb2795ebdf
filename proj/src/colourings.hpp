#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "grid.hpp"
#include "metric.hpp"
#include "rng.hpp"

namespace fpp {

/// Closed vocabulary of monotone maps for the psi/phi densities, so the
/// positivity and monotonicity conditions stay checkable.
struct MonotoneMapSpec {
    enum class Kind { kIndicator, kPositivePart, kExp, kAffineClamp };
    Kind kind = Kind::kIndicator;
    double scale = 1.0;  // affine-clamp: clamp(scale*x + shift, floor_, cap)
    double shift = 0.0;
    double floor_ = 0.0;
    double cap = std::numeric_limits<double>::infinity();

    double operator()(double x) const;
    static const char* kind_name(Kind k);
};

/// psi requirements: nondecreasing with psi(x) > 0 iff x > 0. Probed on a
/// fixed sample of points; throws naming the violated condition.
void validate_psi(const MonotoneMapSpec& psi);
/// phi requirements: continuous (structural here), strictly positive,
/// nondecreasing.
void validate_phi(const MonotoneMapSpec& phi);

struct RadiusLaw {
    enum class Kind { kConstant, kExpTail };
    Kind kind = Kind::kConstant;
    double r0 = 1.0;   // constant radius
    double rate = 1.0; // exp-tail: P(r >= t) = exp(-rate*t)

    void validate() const;
    double quantile(double q) const;
    double sample(double u) const;  // u uniform in [0,1)
};

struct WeightLaw {
    enum class Kind { kBernoulli, kConstant };
    Kind kind = Kind::kBernoulli;
    double p = 0.5;      // Bernoulli: weight 0 with probability p, else 1
    double value = 1.0;  // constant law

    void validate() const;
};

// ---- densities from Gaussian fields ---------------------------------------

/// sigma = 0 where f + level <= 0, sigma = 1 where f + level > 0
/// (sign(0) counts as -1).
Colouring sign_colouring(const ScalarField& f, double level);

/// sigma(x) = psi(f(x) + level).
Colouring psi_density(const ScalarField& f, double level, const MonotoneMapSpec& psi);

/// sigma(x) = sqrt(phi(f(x))): grid path time then equals Riemannian length
/// for the conformal metric phi(f) g0.
Colouring conformal_density(const ScalarField& f, const MonotoneMapSpec& phi);

// ---- point-process models --------------------------------------------------

/// Homogeneous Poisson process on the region. Point count and positions are
/// seed-deterministic; per-point marks (used by thinning) come from the same
/// stream.
PointCloud sample_poisson(const Box& region, double lambda, const RngSeed& seed);

/// Keep points whose mark is < fraction. Shares marks with the parent cloud,
/// so lambda-orderings couple monotonely.
PointCloud thin_cloud(const PointCloud& cloud, double fraction);

/// Margin the cloud region must extend beyond the grid: three expected
/// nearest-neighbour spacings.
double voronoi_margin(int dim, double lambda);

/// Nearest-point Voronoi rasterization; each cell is white (density 0) with
/// probability p, keyed by a coordinate hash of its point so that p orderings
/// couple monotonely. Ties go to the lowest point index.
Colouring voronoi_colouring(const PointCloud& cloud, double p, const GridSpec& g,
                            const RngSeed& seed);

/// Density 0 inside the union of balls, 1 outside. Radii are drawn per point
/// from the law via coordinate hashes. The cloud region must cover the grid
/// padded by the law's 1-1e-9 quantile.
Colouring boolean_colouring(const PointCloud& cloud, const RadiusLaw& radii,
                            const GridSpec& g, const RngSeed& seed);

/// Constant density sigma == value.
Colouring constant_colouring(const GridSpec& g, double value);

// ---- lattice ----------------------------------------------------------------

/// i.i.d. edge weights on the hypercubic lattice with vertices
/// lo .. lo+extent-1 per axis.
EdgeWeights bernoulli_edge_weights(int dim, const std::array<std::int64_t, 3>& lo,
                                   const std::array<std::int64_t, 3>& extent,
                                   const WeightLaw& law, const RngSeed& seed);

}  // namespace fpp

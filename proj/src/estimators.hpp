#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"
#include "stats.hpp"

namespace fpp {

/// Runs fn(0..n-1) on a small pool; each task writes its own slot, so results
/// do not depend on the thread count or schedule.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

struct EstimatorOptions {
    int replicas = 100;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string stream_prefix;  // namespaces RNG labels; one family per task
};

// ---- time constant ---------------------------------------------------------

struct MuPoint {
    double n = 0;
    Estimate est;
};

struct MuCurve {
    std::array<double, 3> direction{1, 0, 0};
    std::vector<MuPoint> points;
    /// Subadditive consistency across tested (n, m, n+m) triples:
    /// mean(n+m) <= mean(n) n/(n+m) + mean(m) m/(n+m) + 3 combined stderr.
    bool subadditive_ok = true;
    std::string note;
};

/// Per-n Monte-Carlo estimates of T(0, n v)/n with independent replica
/// streams per n. Endpoints sit at +-(n/2) v so the grid is used evenly.
MuCurve estimate_mu(const ModelSpec& m, std::array<double, 3> v,
                    const std::vector<double>& n_list, double half_extent,
                    const EstimatorOptions& opt);

// ---- one-arm ----------------------------------------------------------------

struct OneArmPoint {
    double radius = 0;
    Proportion prob;
};

struct OneArmCurve {
    std::vector<OneArmPoint> points;
    std::optional<Estimate> exponent;  // absent when the fit was refused
    std::size_t fit_lo = 0, fit_hi = 0;
    std::string note;
};

/// P[Cross_0(A_{1,R})] per radius (white-path connectivity, not travel
/// times), with a weighted log-log exponent fit over the window [fit_lo,
/// fit_hi]. The window is never auto-selected; an out-of-range one throws.
OneArmCurve estimate_one_arm(const ModelSpec& m, const std::vector<double>& radii,
                             double half_extent, std::size_t fit_lo, std::size_t fit_hi,
                             const EstimatorOptions& opt);

// ---- rectangle crossings -----------------------------------------------------

struct CrossingPoint {
    double scale = 0;
    Proportion prob;
};

std::vector<CrossingPoint> estimate_crossing(const ModelSpec& m, const RectSpec& base,
                                             const std::vector<double>& scales, int colour,
                                             const EstimatorOptions& opt);

// ---- quasi-independence -------------------------------------------------------

struct IndReport {
    double Q = 0, S = 0, delta = 0;
    Estimate defect;  // |P(E_A and E_B) - P(E_A) P(E_B)|, batch-mean stderr
    Proportion pa, pb;
    double pab = 0;
};

/// Covariance defect of the decreasing events {T(A) < delta} on two annuli of
/// diameter S at distance Q (Q = 0 collapses both onto the same annulus, the
/// total-dependence control).
IndReport estimate_ind(const ModelSpec& m, double Q, double S, double delta,
                       const EstimatorOptions& opt);

// ---- renormalization inequality ------------------------------------------------

struct RenormReport {
    double Q = 0, R = 0, S = 0, delta = 0;
    std::int64_t N = 0, n = 0;
    bool vacuous = false;
    /// Covering count: unit balls centered on the mid-sphere of a width-2R
    /// shell, maximized over the N shells.
    std::int64_t covering_count = 0;
    /// c_d with the exact binomial folded in, so (c_d S^{d-1} R/Q)^n equals
    /// binom(N,n) covering_count^n; zero when vacuous.
    double c_d = 0;
    Proportion lhs;         // P[T(A_S)/S < delta/(1+Q/R)]
    Proportion p_r;         // P[T(A_R)/R < delta]
    Estimate ind;           // quasi-independence term
    double rhs = 0, rhs_lo = 0, rhs_hi = 0;
    std::string verdict;    // "holds" | "violated" | "inconclusive"
    std::string note;
};

/// Scale bookkeeping: N = floor((S-1)/(2R+Q)), n = floor(N Q / (2R+2Q)).
struct RenormScales {
    std::int64_t N = 0, n = 0;
};
RenormScales renorm_scales(double Q, double R, double S);

RenormReport check_renormalization(const ModelSpec& m, double Q, double R, double S,
                                   double delta, const EstimatorOptions& opt);

// ---- ball shape -----------------------------------------------------------------

struct BallShapeReport {
    std::vector<double> t_list;
    int bins = 32;
    /// radius[ti][b]: mean over replicas of (max |x| over B_t nodes in angular
    /// bin b) / t.
    std::vector<std::vector<Estimate>> radius;
    std::vector<Estimate> directional_mu;          // t_max / binned radius
    std::vector<std::array<double, 2>> fitted_k;   // convex symmetric polygon
    std::vector<double> hausdorff;                 // per t, against fitted_k
    bool vanishing_regime = false;
    std::vector<double> growth_ratio;              // per t: mean max radius / t
    std::string note;
};

/// Rescaled-ball geometry for 2D models. In the vanishing-mu regime (balls
/// clipped by the grid or all directional estimates under the 2h/t_max
/// resolution floor) the fit is skipped and growth diagnostics returned.
BallShapeReport ball_shape(const ModelSpec& m, const std::vector<double>& t_list,
                           double half_extent, int bins, const EstimatorOptions& opt);

// ---- geometry helpers shared with tests -----------------------------------------

/// Convex hull (counter-clockwise) of a 2D point set.
std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> pts);

/// Hausdorff distance between two polygonal regions (boundary-sampled).
double polygon_hausdorff(const std::vector<std::array<double, 2>>& a,
                         const std::vector<std::array<double, 2>>& b);

/// Minimal number of unit balls centered on the sphere of radius rho that
/// cover it (constructive bound used in the renormalization report).
std::int64_t sphere_covering_count(int dim, double rho);

}  // namespace fpp

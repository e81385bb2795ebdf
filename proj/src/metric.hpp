#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "grid.hpp"

namespace fpp {

/// Diagonal step factors. sqrt(2) and sqrt(3) are rounded *up* to 26
/// significant bits: colouring path times then accumulate exactly in double
/// (every partial sum is representable), so the pseudometric axioms hold
/// bit-for-bit, and rounding up keeps grid times >= Euclidean length.
/// Relative overestimate is below 1.1e-8.
double diag_step_2d();
double diag_step_3d();

/// Worst-case grid-time / Euclidean-distance ratio for sigma == 1 in 2D:
/// 1/cos(pi/8) plus the 26-bit diagonal rounding allowance.
inline constexpr double kAnisotropyBound2D = 1.0823922102923942;

struct AnnulusSpec {
    std::array<double, 3> center{0, 0, 0};
    double inner = 1.0;
    double outer = 2.0;
};

struct RectSpec {
    Box box;
    int axis = 0;
};

/// Nodes within h*sqrt(d)/2 of the sphere |x - center| = radius.
std::vector<std::int64_t> shell_nodes(const GridSpec& g,
                                      const std::array<double, 3>& center,
                                      double radius);

/// Multi-source shortest time over the 8-neighbour (2D) / 26-neighbour (3D)
/// grid graph with edge weight = Euclidean step length times the mean of the
/// endpoint densities. Deterministic: queue ties break on node index.
TimeField shortest_time(const Colouring& sigma, std::span<const std::int64_t> sources);

/// Same, but stops expanding past t_max; nodes beyond the horizon keep the
/// +inf marker.
TimeField shortest_time_truncated(const Colouring& sigma,
                                  std::span<const std::int64_t> sources, double t_max);

/// T(x,y). Evaluated from the lower-indexed endpoint so the result is
/// symmetric by construction.
double point_time(const Colouring& sigma, std::int64_t x, std::int64_t y);

/// T(A_{r,R}): least time from the inner shell to the outer shell. Paths may
/// leave the annulus (they live on the whole grid).
double annulus_time(const Colouring& sigma, const AnnulusSpec& annulus);

/// True iff one zero-density component meets both shells; on the grid this
/// is equivalent to annulus_time == 0. Computed by flood fill, independently
/// of the shortest-path engine.
bool annulus_zero_crossing(const Colouring& sigma, const AnnulusSpec& annulus);

/// Lengthwise crossing of an axis-aligned box by colour-j nodes.
/// Requires a two-valued colouring.
bool rect_crossing(const Colouring& sigma, const RectSpec& rect, int colour);

// ---- hypercubic lattice (classical FPP) --------------------------------

/// Vertices on integer coordinates lo[a] .. lo[a]+extent[a]-1; weights[v*dim+a]
/// is the time of the edge from vertex v towards +e_a (slots leaving the
/// lattice are unused).
struct EdgeWeights {
    int dim = 2;
    std::array<std::int64_t, 3> lo{0, 0, 0};
    std::array<std::int64_t, 3> extent{1, 1, 1};
    std::vector<double> weights;

    std::int64_t vertex_count() const {
        std::int64_t n = 1;
        for (int a = 0; a < dim; ++a) n *= extent[a];
        return n;
    }
    std::array<std::int64_t, 3> coords(std::int64_t v) const;
    std::int64_t vertex_at(const std::array<std::int64_t, 3>& c) const;  // -1 if outside
};

std::vector<double> lattice_shortest_time(const EdgeWeights& w, std::int64_t source);

std::vector<std::int64_t> lattice_shell(const EdgeWeights& w,
                                        const std::array<double, 3>& center,
                                        double radius);

double lattice_annulus_time(const EdgeWeights& w, const AnnulusSpec& annulus);
bool lattice_annulus_zero_crossing(const EdgeWeights& w, const AnnulusSpec& annulus);

}  // namespace fpp

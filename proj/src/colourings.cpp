#include "colourings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpp {

double MonotoneMapSpec::operator()(double x) const {
    switch (kind) {
        case Kind::kIndicator:
            return x > 0 ? 1.0 : 0.0;
        case Kind::kPositivePart:
            return x > 0 ? x : 0.0;
        case Kind::kExp:
            return std::exp(x);
        case Kind::kAffineClamp:
            return std::min(cap, std::max(floor_, scale * x + shift));
    }
    return 0.0;
}

const char* MonotoneMapSpec::kind_name(Kind k) {
    switch (k) {
        case Kind::kIndicator: return "indicator";
        case Kind::kPositivePart: return "positive-part";
        case Kind::kExp: return "exp";
        case Kind::kAffineClamp: return "affine-clamp";
    }
    return "?";
}

namespace {

// Probe range covers +-30: far beyond the values any sampled field reaches,
// while exp() stays representable in double.
std::vector<double> probe_points() {
    std::vector<double> xs;
    for (int i = -60; i <= 60; ++i) xs.push_back(static_cast<double>(i) / 4.0);
    xs.push_back(-1e-9);
    xs.push_back(1e-9);
    xs.push_back(-30.0);
    xs.push_back(30.0);
    return xs;
}

}  // namespace

void validate_psi(const MonotoneMapSpec& psi) {
    auto sorted = probe_points();
    std::sort(sorted.begin(), sorted.end());
    double prev = -std::numeric_limits<double>::infinity();
    for (double x : sorted) {
        const double y = psi(x);
        if (!(y >= 0) || !std::isfinite(y))
            throw std::invalid_argument(std::string("psi probe failed: psi(") +
                                        format_double(x) + ") is not finite nonnegative");
        if (y < prev)
            throw std::invalid_argument(std::string("psi probe failed: not nondecreasing at x=") +
                                        format_double(x));
        prev = y;
        const bool pos = y > 0;
        if (pos != (x > 0))
            throw std::invalid_argument(
                std::string("psi probe failed: psi(x) > 0 iff x > 0 violated at x=") +
                format_double(x) + " (psi kind " + MonotoneMapSpec::kind_name(psi.kind) + ")");
    }
}

void validate_phi(const MonotoneMapSpec& phi) {
    auto sorted = probe_points();
    std::sort(sorted.begin(), sorted.end());
    double prev = -std::numeric_limits<double>::infinity();
    for (double x : sorted) {
        const double y = phi(x);
        if (!(y > 0) || !std::isfinite(y))
            throw std::invalid_argument(std::string("phi probe failed: phi(") +
                                        format_double(x) + ") <= 0 (phi kind " +
                                        MonotoneMapSpec::kind_name(phi.kind) + ")");
        if (y < prev)
            throw std::invalid_argument(std::string("phi probe failed: not nondecreasing at x=") +
                                        format_double(x));
        prev = y;
    }
}

void RadiusLaw::validate() const {
    if (kind == Kind::kConstant) {
        if (!(r0 > 0)) throw std::invalid_argument("radius.r0 must be > 0");
    } else {
        if (!(rate > 0))
            throw std::invalid_argument(
                "radius.rate must be > 0 (exponential-tail condition needs c > 0)");
    }
}

double RadiusLaw::quantile(double q) const {
    if (kind == Kind::kConstant) return r0;
    return -std::log1p(-q) / rate;
}

double RadiusLaw::sample(double u) const {
    if (kind == Kind::kConstant) return r0;
    // P(r >= t) = exp(-rate*t) exactly.
    return -std::log1p(-std::min(u, 1.0 - 1e-16)) / rate;
}

void WeightLaw::validate() const {
    if (kind == Kind::kBernoulli) {
        if (!(p >= 0 && p <= 1)) throw std::invalid_argument("law.p must lie in [0,1]");
    } else {
        if (!(value >= 0))
            throw std::invalid_argument("law.value must be >= 0 (weights live on R+)");
    }
}

// ---- field-based densities --------------------------------------------------

Colouring sign_colouring(const ScalarField& f, double level) {
    Colouring c;
    c.grid = f.grid;
    c.tag = ModelTag::kGaussianSign;
    c.density.resize(f.values.size());
    for (std::size_t k = 0; k < f.values.size(); ++k)
        c.density[k] = (f.values[k] + level > 0) ? 1.0 : 0.0;
    return c;
}

Colouring psi_density(const ScalarField& f, double level, const MonotoneMapSpec& psi) {
    validate_psi(psi);
    Colouring c;
    c.grid = f.grid;
    c.tag = ModelTag::kGaussianPsi;
    c.density.resize(f.values.size());
    for (std::size_t k = 0; k < f.values.size(); ++k) c.density[k] = psi(f.values[k] + level);
    return c;
}

Colouring conformal_density(const ScalarField& f, const MonotoneMapSpec& phi) {
    validate_phi(phi);
    Colouring c;
    c.grid = f.grid;
    c.tag = ModelTag::kConformal;
    c.density.resize(f.values.size());
    for (std::size_t k = 0; k < f.values.size(); ++k) c.density[k] = std::sqrt(phi(f.values[k]));
    return c;
}

// ---- point processes ----------------------------------------------------------

PointCloud sample_poisson(const Box& region, double lambda, const RngSeed& seed) {
    if (lambda < 0) throw std::invalid_argument("Poisson intensity must be >= 0");
    const double vol = region.volume();
    if (!(vol > 0)) throw std::invalid_argument("Poisson region is empty");
    RngStream rng(seed);

    // Poisson(mean) as a sum of chunks with mean <= 16 keeps the
    // product-of-uniforms inversion away from underflow.
    auto poisson_small = [&rng](double mean) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = rng.uniform_pos();
        while (prod > limit) {
            ++k;
            prod *= rng.uniform_pos();
        }
        return k;
    };
    double mean = lambda * vol;
    std::uint64_t count = 0;
    while (mean > 16.0) {
        count += poisson_small(16.0);
        mean -= 16.0;
    }
    count += poisson_small(mean);

    PointCloud cloud;
    cloud.dim = region.dim;
    cloud.region = region;
    cloud.intensity = lambda;
    cloud.points.resize(count);
    cloud.marks.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        for (int a = 0; a < region.dim; ++a)
            cloud.points[i][a] = region.lo[a] + region.side(a) * rng.uniform();
        cloud.marks[i] = rng.uniform();
    }
    return cloud;
}

PointCloud thin_cloud(const PointCloud& cloud, double fraction) {
    if (!(fraction >= 0 && fraction <= 1))
        throw std::invalid_argument("thinning fraction must lie in [0,1]");
    if (cloud.marks.size() != cloud.points.size())
        throw std::invalid_argument("cloud has no marks to thin by");
    PointCloud out;
    out.dim = cloud.dim;
    out.region = cloud.region;
    out.intensity = cloud.intensity * fraction;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        if (cloud.marks[i] < fraction) {
            out.points.push_back(cloud.points[i]);
            out.marks.push_back(cloud.marks[i]);
            if (!cloud.radii.empty()) out.radii.push_back(cloud.radii[i]);
        }
    }
    return out;
}

double voronoi_margin(int dim, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("Voronoi intensity must be > 0");
    // Mean nearest-neighbour distance of a Poisson process:
    // d=2: 1/(2 sqrt(lambda)); d=3: Gamma(4/3) (4 pi lambda / 3)^(-1/3).
    const double spacing =
        dim == 2 ? 0.5 / std::sqrt(lambda)
                 : 0.8929795115692493 * std::pow(4.18879020478639098 * lambda, -1.0 / 3.0);
    return 3.0 * spacing;
}

namespace {

/// Uniform bucket grid for nearest-neighbour queries over the cloud.
class BucketIndex {
public:
    BucketIndex(const PointCloud& cloud, double cell)
        : cloud_(cloud), cell_(cell) {
        for (int a = 0; a < cloud.dim; ++a) {
            lo_[a] = cloud.region.lo[a];
            n_[a] = std::max<std::int64_t>(
                1, static_cast<std::int64_t>(std::ceil(cloud.region.side(a) / cell_)));
        }
        buckets_.resize(static_cast<std::size_t>(n_[0] * n_[1] * (cloud.dim == 3 ? n_[2] : 1)));
        for (std::size_t i = 0; i < cloud.points.size(); ++i)
            buckets_[bucket_of(cloud.points[i])].push_back(i);
    }

    /// Index of the nearest point; ties by lowest index. -1 when empty.
    std::int64_t nearest(const std::array<double, 3>& x) const {
        if (cloud_.points.empty()) return -1;
        std::array<std::int64_t, 3> c{0, 0, 0};
        for (int a = 0; a < cloud_.dim; ++a)
            c[a] = clampi(static_cast<std::int64_t>(std::floor((x[a] - lo_[a]) / cell_)), a);
        std::int64_t best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::int64_t ring = 0;; ++ring) {
            // Once a hit exists, rings beyond best distance cannot improve it.
            if (best >= 0) {
                const double reach = (static_cast<double>(ring) - 1.0) * cell_;
                if (reach > 0 && reach * reach > best_d2) break;
            }
            bool any_cell = false;
            visit_ring(c, ring, [&](std::size_t b) {
                any_cell = true;
                for (std::size_t i : buckets_[b]) {
                    double d2 = 0;
                    for (int a = 0; a < cloud_.dim; ++a) {
                        const double dx = x[a] - cloud_.points[i][a];
                        d2 += dx * dx;
                    }
                    if (d2 < best_d2 ||
                        (d2 == best_d2 && static_cast<std::int64_t>(i) < best)) {
                        best_d2 = d2;
                        best = static_cast<std::int64_t>(i);
                    }
                }
            });
            if (!any_cell && best >= 0) break;
            if (!any_cell && ring > n_[0] + n_[1] + n_[2]) break;
        }
        return best;
    }

private:
    std::int64_t clampi(std::int64_t v, int a) const {
        return std::max<std::int64_t>(0, std::min(n_[a] - 1, v));
    }

    std::size_t bucket_of(const std::array<double, 3>& x) const {
        std::array<std::int64_t, 3> c{0, 0, 0};
        for (int a = 0; a < cloud_.dim; ++a)
            c[a] = clampi(static_cast<std::int64_t>(std::floor((x[a] - lo_[a]) / cell_)), a);
        return flat(c);
    }

    std::size_t flat(const std::array<std::int64_t, 3>& c) const {
        return static_cast<std::size_t>(c[0] + n_[0] * (c[1] + (cloud_.dim == 3 ? n_[1] * c[2] : 0)));
    }

    template <class F>
    void visit_ring(const std::array<std::int64_t, 3>& c, std::int64_t ring, F&& fn) const {
        const std::int64_t zlo = cloud_.dim == 3 ? c[2] - ring : 0;
        const std::int64_t zhi = cloud_.dim == 3 ? c[2] + ring : 0;
        for (std::int64_t z = zlo; z <= zhi; ++z) {
            if (cloud_.dim == 3 && (z < 0 || z >= n_[2])) continue;
            for (std::int64_t y = c[1] - ring; y <= c[1] + ring; ++y) {
                if (y < 0 || y >= n_[1]) continue;
                for (std::int64_t x = c[0] - ring; x <= c[0] + ring; ++x) {
                    if (x < 0 || x >= n_[0]) continue;
                    const std::int64_t cheb = std::max(
                        {std::llabs(x - c[0]), std::llabs(y - c[1]),
                         cloud_.dim == 3 ? std::llabs(z - c[2]) : 0});
                    if (cheb != ring) continue;
                    fn(flat({x, y, z}));
                }
            }
        }
    }

    const PointCloud& cloud_;
    double cell_;
    std::array<double, 3> lo_{0, 0, 0};
    std::array<std::int64_t, 3> n_{1, 1, 1};
    std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace

Colouring voronoi_colouring(const PointCloud& cloud, double p, const GridSpec& g,
                            const RngSeed& seed) {
    g.validate();
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("p must lie in [0,1]");
    if (cloud.points.empty()) throw std::invalid_argument("Voronoi cloud is empty");
    if (cloud.intensity > 0) {
        const Box want = g.bounding_box().padded(voronoi_margin(g.dim, cloud.intensity));
        for (int a = 0; a < g.dim; ++a)
            if (cloud.region.lo[a] > want.lo[a] + 1e-9 || cloud.region.hi[a] < want.hi[a] - 1e-9)
                throw std::invalid_argument(
                    "Voronoi cloud region does not cover the grid plus margin");
    }

    // White with probability p, keyed per cell so the coupling in p is exact.
    std::vector<double> cell_white(cloud.points.size());
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        cell_white[i] = coordinate_hash_uniform(seed.master, "voronoi-cell",
                                                cloud.points[i], cloud.dim);

    const double cell = std::max(1e-9, 1.0 / std::pow(std::max(cloud.intensity, 1e-12),
                                                      1.0 / g.dim));
    BucketIndex index(cloud, cell);
    Colouring c;
    c.grid = g;
    c.tag = ModelTag::kVoronoi;
    c.density.resize(static_cast<std::size_t>(g.node_count()));
    const std::int64_t n = g.node_count();
    for (std::int64_t k = 0; k < n; ++k) {
        const std::int64_t i = index.nearest(g.coordinate(k));
        if (i < 0) throw std::logic_error("nearest-point query failed on a nonempty cloud");
        c.density[static_cast<std::size_t>(k)] =
            cell_white[static_cast<std::size_t>(i)] < p ? 0.0 : 1.0;
    }
    return c;
}

Colouring boolean_colouring(const PointCloud& cloud, const RadiusLaw& radii,
                            const GridSpec& g, const RngSeed& seed) {
    g.validate();
    radii.validate();
    const double margin = radii.quantile(1.0 - 1e-9);
    const Box want = g.bounding_box().padded(margin);
    for (int a = 0; a < g.dim; ++a)
        if (cloud.region.lo[a] > want.lo[a] + 1e-9 || cloud.region.hi[a] < want.hi[a] - 1e-9)
            throw std::invalid_argument(
                "Boolean cloud margin smaller than the radius-law 1-1e-9 quantile (" +
                format_double(margin) + ")");

    Colouring c;
    c.grid = g;
    c.tag = ModelTag::kBoolean;
    c.density.assign(static_cast<std::size_t>(g.node_count()), 1.0);

    // Stamp each ball onto the grid; density 0 inside the union.
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const double u =
            coordinate_hash_uniform(seed.master, "boolean-radius", cloud.points[i], cloud.dim);
        const double r = radii.sample(u);
        const auto& x = cloud.points[i];
        std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
        bool overlap = true;
        for (int a = 0; a < g.dim; ++a) {
            lo[a] = static_cast<std::int64_t>(std::ceil((x[a] - r - g.origin[a]) / g.h));
            hi[a] = static_cast<std::int64_t>(std::floor((x[a] + r - g.origin[a]) / g.h));
            lo[a] = std::max<std::int64_t>(lo[a], 0);
            hi[a] = std::min<std::int64_t>(hi[a], g.extent[a] - 1);
            if (lo[a] > hi[a]) overlap = false;
        }
        if (!overlap) continue;
        const double r2 = r * r;
        const std::int64_t zlo = g.dim == 3 ? lo[2] : 0, zhi = g.dim == 3 ? hi[2] : 0;
        for (std::int64_t z = zlo; z <= zhi; ++z)
            for (std::int64_t y = lo[1]; y <= hi[1]; ++y)
                for (std::int64_t xi = lo[0]; xi <= hi[0]; ++xi) {
                    double d2 = 0;
                    const std::array<std::int64_t, 3> m{xi, y, z};
                    for (int a = 0; a < g.dim; ++a) {
                        const double dx = g.origin[a] + g.h * static_cast<double>(m[a]) - x[a];
                        d2 += dx * dx;
                    }
                    if (d2 <= r2) c.density[static_cast<std::size_t>(g.flat_index(m))] = 0.0;
                }
    }
    return c;
}

Colouring constant_colouring(const GridSpec& g, double value) {
    g.validate();
    if (!(value >= 0)) throw std::invalid_argument("constant density must be >= 0");
    Colouring c;
    c.grid = g;
    c.tag = ModelTag::kConstant;
    c.density.assign(static_cast<std::size_t>(g.node_count()), value);
    return c;
}

EdgeWeights bernoulli_edge_weights(int dim, const std::array<std::int64_t, 3>& lo,
                                   const std::array<std::int64_t, 3>& extent,
                                   const WeightLaw& law, const RngSeed& seed) {
    law.validate();
    if (dim != 2 && dim != 3) throw std::invalid_argument("lattice dimension must be 2 or 3");
    EdgeWeights w;
    w.dim = dim;
    w.lo = lo;
    w.extent = extent;
    const std::int64_t n = w.vertex_count();
    w.weights.resize(static_cast<std::size_t>(n * dim));
    RngStream rng(seed);
    for (std::int64_t v = 0; v < n; ++v)
        for (int a = 0; a < dim; ++a) {
            double value;
            if (law.kind == WeightLaw::Kind::kBernoulli)
                value = rng.uniform() < law.p ? 0.0 : 1.0;
            else
                value = law.value;
            w.weights[static_cast<std::size_t>(v * dim + a)] = value;
        }
    return w;
}

}  // namespace fpp

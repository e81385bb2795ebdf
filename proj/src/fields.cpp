#include "fields.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace fpp {

void KernelSpec::validate() const {
    switch (kind) {
        case Kind::kGaussian:
            if (!(length_scale > 0)) throw std::invalid_argument("kernel length scale must be > 0");
            break;
        case Kind::kDelta:
            break;
        case Kind::kTabulated: {
            if (table.empty()) throw std::invalid_argument("tabulated kernel needs samples");
            if (table.front().first != 0.0)
                throw std::invalid_argument("tabulated kernel must start at r = 0");
            if (!(table.front().second > 0))
                throw std::invalid_argument("tabulated kernel needs kappa(0) > 0");
            for (std::size_t i = 1; i < table.size(); ++i)
                if (!(table[i].first > table[i - 1].first))
                    throw std::invalid_argument("tabulated kernel radii must increase");
            break;
        }
    }
}

double KernelSpec::value(double r) const {
    switch (kind) {
        case Kind::kGaussian: {
            const double u = r / length_scale;
            return std::exp(-0.5 * u * u);
        }
        case Kind::kDelta:
            return r == 0.0 ? 1.0 : 0.0;
        case Kind::kTabulated: {
            const double k0 = table.front().second;
            if (r <= 0) return 1.0;
            if (r >= table.back().first) return 0.0;
            auto it = std::lower_bound(table.begin(), table.end(), r,
                                       [](const auto& e, double x) { return e.first < x; });
            const auto& b = *it;
            const auto& a = *(it - 1);
            const double t = (r - a.first) / (b.first - a.first);
            return (a.second + t * (b.second - a.second)) / k0;
        }
    }
    return 0.0;
}

// ---- truncation oracle -----------------------------------------------------

double truncation_tail(int truncation, double radius) {
    if (truncation < 0) throw std::invalid_argument("truncation must be >= 0");
    const double r2 = radius * radius;
    if (r2 == 0.0) return 0.0;
    // Forward summation from k = N+1; no cancellation.
    const int k0 = truncation + 1;
    double log_term = -r2 + static_cast<double>(k0) * std::log(r2) - std::lgamma(k0 + 1.0);
    double term = std::exp(log_term);
    double sum = 0.0;
    for (int k = k0; k < k0 + 100000; ++k) {
        sum += term;
        term *= r2 / static_cast<double>(k + 1);
        if (term < sum * 1e-18 && k > r2) break;
    }
    return sum;
}

int required_truncation(double radius, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be > 0");
    if (radius == 0.0) return 0;
    int hi = 1;
    while (truncation_tail(hi, radius) >= tol) {
        hi *= 2;
        if (hi > (1 << 22)) throw std::runtime_error("truncation search diverged");
    }
    int lo = 0;
    // Smallest N with tail < tol; the tail is strictly decreasing in N.
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (truncation_tail(mid, radius) < tol)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

double worst_corner_radius(const GridSpec& g) {
    double r2 = 0;
    for (int a = 0; a < g.dim; ++a) {
        const double lo = std::abs(g.origin[a]);
        const double hi = std::abs(g.origin[a] + g.h * static_cast<double>(g.extent[a] - 1));
        const double m = std::max(lo, hi);
        r2 += m * m;
    }
    return std::sqrt(r2);
}

ScalarField sample_bargmann_fock(const GridSpec& g, int truncation, const RngSeed& seed,
                                 double tol) {
    g.validate();
    if (g.dim != 2)
        throw std::invalid_argument("Bargmann-Fock series is two-dimensional; got d=" +
                                    std::to_string(g.dim));
    const double radius = worst_corner_radius(g);
    if (radius >= 37.0)
        throw std::invalid_argument(
            "domain radius " + std::to_string(radius) +
            " too large for the series sampler; use the spectral sampler");
    const int needed = required_truncation(radius, tol);
    if (truncation < needed)
        throw std::invalid_argument("truncation N=" + std::to_string(truncation) +
                                    " under-resolves the domain (radius " +
                                    std::to_string(radius) + ", tol " + std::to_string(tol) +
                                    "); required N=" + std::to_string(needed));

    const int N = truncation;
    RngStream rng(seed);
    // a_ij for i+j <= N, i outer, j inner; the draw order is part of the
    // determinism contract.
    std::vector<std::vector<double>> coeff(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
        coeff[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(N - i) + 1);
        for (int j = 0; j <= N - i; ++j) coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rng.normal();
    }

    const std::int64_t nx = g.extent[0], ny = g.extent[1];
    // Normalized monomials u^k / sqrt(k!) stay bounded by exp(u^2/2).
    auto monomials = [N](double u) {
        std::vector<double> m(static_cast<std::size_t>(N) + 1);
        m[0] = 1.0;
        for (int k = 1; k <= N; ++k)
            m[static_cast<std::size_t>(k)] =
                m[static_cast<std::size_t>(k - 1)] * u / std::sqrt(static_cast<double>(k));
        return m;
    };

    std::vector<std::vector<double>> vpow(static_cast<std::size_t>(ny));
    for (std::int64_t c = 0; c < ny; ++c)
        vpow[static_cast<std::size_t>(c)] = monomials(g.origin[1] + g.h * static_cast<double>(c));

    // S[i][c] = sum_j a_ij v_c^j / sqrt(j!)
    std::vector<double> S(static_cast<std::size_t>((N + 1) * ny), 0.0);
    for (int i = 0; i <= N; ++i) {
        const auto& row = coeff[static_cast<std::size_t>(i)];
        for (std::int64_t c = 0; c < ny; ++c) {
            const auto& vp = vpow[static_cast<std::size_t>(c)];
            double acc = 0;
            for (int j = 0; j <= N - i; ++j) acc += row[static_cast<std::size_t>(j)] * vp[static_cast<std::size_t>(j)];
            S[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(c)] = acc;
        }
    }

    ScalarField f;
    f.grid = g;
    f.values.resize(static_cast<std::size_t>(g.node_count()));
    for (std::int64_t r = 0; r < nx; ++r) {
        const double u = g.origin[0] + g.h * static_cast<double>(r);
        const auto up = monomials(u);
        for (std::int64_t c = 0; c < ny; ++c) {
            const double v = g.origin[1] + g.h * static_cast<double>(c);
            double acc = 0;
            for (int i = 0; i <= N; ++i)
                acc += up[static_cast<std::size_t>(i)] *
                       S[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(c)];
            f.values[static_cast<std::size_t>(r + nx * c)] = std::exp(-0.5 * (u * u + v * v)) * acc;
        }
    }
    return f;
}

// ---- spectral sampler ------------------------------------------------------

namespace {

std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

std::int64_t next_5smooth(std::int64_t n) {
    for (std::int64_t m = n;; ++m) {
        std::int64_t r = m;
        for (std::int64_t p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

struct Embedding {
    std::array<std::int64_t, 3> torus{1, 1, 1};
    std::vector<double> sqrt_eig;  // clipped, sqrt'ed
    double min_eig = 0.0;
    double max_eig = 0.0;
    std::int64_t total() const { return torus[0] * torus[1] * torus[2]; }
};

void fft_c2c(const std::array<std::int64_t, 3>& torus, int dim,
             std::complex<double>* data, int sign) {
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        if (dim == 2)
            plan = fftw_plan_dft_2d(static_cast<int>(torus[1]), static_cast<int>(torus[0]),
                                    reinterpret_cast<fftw_complex*>(data),
                                    reinterpret_cast<fftw_complex*>(data), sign,
                                    FFTW_ESTIMATE);
        else
            plan = fftw_plan_dft_3d(static_cast<int>(torus[2]), static_cast<int>(torus[1]),
                                    static_cast<int>(torus[0]),
                                    reinterpret_cast<fftw_complex*>(data),
                                    reinterpret_cast<fftw_complex*>(data), sign,
                                    FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(plan);
    }
}

Embedding build_embedding(const GridSpec& g, const KernelSpec& kernel) {
    kernel.validate();
    Embedding emb;
    for (int a = 0; a < g.dim; ++a) emb.torus[a] = next_5smooth(2 * g.extent[a]);
    const std::int64_t M = emb.total();
    std::vector<std::complex<double>> c(static_cast<std::size_t>(M));
    const std::int64_t tx = emb.torus[0], ty = emb.torus[1], tz = g.dim == 3 ? emb.torus[2] : 1;
    for (std::int64_t z = 0; z < tz; ++z)
        for (std::int64_t y = 0; y < ty; ++y)
            for (std::int64_t x = 0; x < tx; ++x) {
                const std::int64_t mx = std::min(x, tx - x);
                const std::int64_t my = std::min(y, ty - y);
                const std::int64_t mz = g.dim == 3 ? std::min(z, tz - z) : 0;
                const double r = g.h * std::sqrt(static_cast<double>(mx * mx + my * my + mz * mz));
                c[static_cast<std::size_t>(x + tx * (y + ty * z))] = kernel.value(r);
            }
    fft_c2c(emb.torus, g.dim, c.data(), FFTW_FORWARD);
    emb.sqrt_eig.resize(static_cast<std::size_t>(M));
    emb.min_eig = c[0].real();
    emb.max_eig = c[0].real();
    for (std::int64_t k = 0; k < M; ++k) {
        const double ev = c[static_cast<std::size_t>(k)].real();
        emb.min_eig = std::min(emb.min_eig, ev);
        emb.max_eig = std::max(emb.max_eig, ev);
    }
    if (emb.min_eig < -1e-10)
        throw std::runtime_error(
            "circulant embedding is not positive semidefinite: worst eigenvalue " +
            std::to_string(emb.min_eig) + "; try padding factor 4 or a smoother kernel");
    for (std::int64_t k = 0; k < M; ++k) {
        const double ev = c[static_cast<std::size_t>(k)].real();
        emb.sqrt_eig[static_cast<std::size_t>(k)] = ev > 0 ? std::sqrt(ev) : 0.0;
    }
    return emb;
}

std::string embedding_key(const GridSpec& g, const KernelSpec& kernel) {
    std::string k = std::to_string(g.dim) + "|" + format_double(g.h);
    for (int a = 0; a < g.dim; ++a) k += "|" + std::to_string(g.extent[a]);
    k += "|" + std::to_string(static_cast<int>(kernel.kind)) + "|" +
         format_double(kernel.length_scale);
    for (const auto& [r, v] : kernel.table) k += "|" + format_double(r) + ":" + format_double(v);
    return k;
}

std::shared_ptr<const Embedding> cached_embedding(const GridSpec& g, const KernelSpec& kernel) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const Embedding>> cache;
    const std::string key = embedding_key(g, kernel);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto emb = std::make_shared<const Embedding>(build_embedding(g, kernel));
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, emb);
    return emb;
}

}  // namespace

EmbeddingInfo spectral_embedding_info(const GridSpec& g, const KernelSpec& kernel) {
    g.validate();
    auto emb = cached_embedding(g, kernel);
    return {emb->torus, emb->min_eig, emb->max_eig};
}

ScalarField sample_stationary_spectral(const GridSpec& g, const KernelSpec& kernel,
                                       const RngSeed& seed) {
    g.validate();
    auto emb = cached_embedding(g, kernel);
    const std::int64_t M = emb->total();
    std::vector<std::complex<double>> w(static_cast<std::size_t>(M));
    RngStream rng(seed);
    for (std::int64_t k = 0; k < M; ++k) {
        const double re = rng.normal();
        const double im = rng.normal();
        w[static_cast<std::size_t>(k)] =
            std::complex<double>(re, im) * emb->sqrt_eig[static_cast<std::size_t>(k)];
    }
    fft_c2c(emb->torus, g.dim, w.data(), FFTW_BACKWARD);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));

    ScalarField f;
    f.grid = g;
    f.values.resize(static_cast<std::size_t>(g.node_count()));
    const std::int64_t nx = g.extent[0], ny = g.extent[1], nz = g.dim == 3 ? g.extent[2] : 1;
    const std::int64_t tx = emb->torus[0], ty = emb->torus[1];
    for (std::int64_t z = 0; z < nz; ++z)
        for (std::int64_t y = 0; y < ny; ++y)
            for (std::int64_t x = 0; x < nx; ++x)
                f.values[static_cast<std::size_t>(x + nx * (y + ny * z))] =
                    w[static_cast<std::size_t>(x + tx * (y + ty * z))].real() * scale;
    return f;
}

Estimate empirical_covariance(std::span<const ScalarField> fields,
                              std::span<const std::int64_t> lag) {
    if (fields.size() < 2)
        throw std::invalid_argument("empirical covariance needs at least 2 replicas");
    const GridSpec& g = fields[0].grid;
    if (static_cast<int>(lag.size()) < g.dim) throw std::invalid_argument("lag has too few components");
    std::array<std::int64_t, 3> L{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
        L[a] = lag[a];
        if (std::llabs(L[a]) >= g.extent[a])
            throw std::invalid_argument("lag exceeds grid extents");
    }
    for (const auto& f : fields)
        if (!f.grid.same_geometry(g)) throw std::invalid_argument("replica grids differ");

    std::vector<double> per_replica;
    per_replica.reserve(fields.size());
    const std::int64_t nx = g.extent[0], ny = g.extent[1], nz = g.dim == 3 ? g.extent[2] : 1;
    for (const auto& f : fields) {
        double sum = 0;
        std::int64_t count = 0;
        for (std::int64_t z = 0; z < nz; ++z)
            for (std::int64_t y = 0; y < ny; ++y)
                for (std::int64_t x = 0; x < nx; ++x) {
                    const std::int64_t x2 = x + L[0], y2 = y + L[1],
                                       z2 = z + (g.dim == 3 ? L[2] : 0);
                    if (x2 < 0 || x2 >= nx || y2 < 0 || y2 >= ny || z2 < 0 || z2 >= nz) continue;
                    sum += f.values[static_cast<std::size_t>(x + nx * (y + ny * z))] *
                           f.values[static_cast<std::size_t>(x2 + nx * (y2 + ny * z2))];
                    ++count;
                }
        if (count == 0) throw std::invalid_argument("lag leaves no node pairs");
        per_replica.push_back(sum / static_cast<double>(count));
    }
    return mean_estimate(per_replica);
}

}  // namespace fpp

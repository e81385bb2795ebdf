#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fields.hpp"
#include "grid.hpp"

using namespace fpp;

namespace {

GridSpec centered(std::int64_t half_nodes, double h) {
    GridSpec g;
    g.dim = 2;
    g.h = h;
    g.extent = {2 * half_nodes + 1, 2 * half_nodes + 1, 1};
    g.origin = {-h * static_cast<double>(half_nodes), -h * static_cast<double>(half_nodes), 0};
    return g;
}

std::vector<ScalarField> bf_replicas(const GridSpec& g, int n, std::uint64_t seed, int N) {
    std::vector<ScalarField> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r)
        out.push_back(sample_bargmann_fock(g, N, RngSeed{seed, static_cast<std::uint32_t>(r), "bf"}));
    return out;
}

std::vector<ScalarField> spectral_replicas(const GridSpec& g, const KernelSpec& k, int n,
                                           std::uint64_t seed) {
    std::vector<ScalarField> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r)
        out.push_back(
            sample_stationary_spectral(g, k, RngSeed{seed, static_cast<std::uint32_t>(r), "sp"}));
    return out;
}

}  // namespace

TEST_CASE("truncation oracle: tail matches a long-double reference sum") {
    // independent route: plain forward sum in long double
    auto reference_tail = [](int N, double r) {
        const long double r2 = static_cast<long double>(r) * r;
        long double term = std::exp(-r2);
        // exp(-r^2) r^{2k}/k! built multiplicatively from k = 0
        long double sum_head = 0;
        for (int k = 0; k <= N; ++k) {
            sum_head += term;
            term *= r2 / (k + 1);
        }
        long double tail = 0;
        for (int k = N + 1; k < N + 2000; ++k) {
            tail += term;
            term *= r2 / (k + 1);
        }
        return static_cast<double>(tail);
    };
    for (double r : {0.5, 1.5, 3.0, 6.0}) {
        for (int N : {0, 2, 8, 20, 50}) {
            const double mine = truncation_tail(N, r);
            const double ref = reference_tail(N, r);
            CHECK(mine == doctest::Approx(ref).epsilon(1e-10));
        }
    }
}

TEST_CASE("required truncation is the minimal admissible N") {
    const double radius = 3.0, tol = 1e-6;
    const int N = required_truncation(radius, tol);
    CHECK(truncation_tail(N, radius) < tol);
    CHECK(truncation_tail(N - 1, radius) >= tol);
    CHECK(required_truncation(0.0, tol) == 0);
}

TEST_CASE("under-truncated requests are rejected with the required N") {
    const auto g = centered(3, 1.0);  // corner radius ~ 4.24
    const int needed = required_truncation(worst_corner_radius(g), 1e-6);
    try {
        sample_bargmann_fock(g, needed / 2, RngSeed{1, 0, "bf"});
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find(std::to_string(needed)) != std::string::npos);
    }
    CHECK_NOTHROW(sample_bargmann_fock(g, needed, RngSeed{1, 0, "bf"}));
}

TEST_CASE("series sampler is 2D only") {
    GridSpec g;
    g.dim = 3;
    g.h = 1.0;
    g.extent = {3, 3, 3};
    g.origin = {-1, -1, -1};
    CHECK_THROWS_AS(sample_bargmann_fock(g, 100, RngSeed{1, 0, "bf"}), std::invalid_argument);
}

TEST_CASE("single node at the origin with N=0 is the first coefficient draw") {
    GridSpec g;
    g.dim = 2;
    g.h = 1.0;
    g.extent = {1, 1, 1};
    g.origin = {0, 0, 0};
    const RngSeed seed{123, 4, "bf"};
    const auto f = sample_bargmann_fock(g, 0, seed);
    RngStream rng(seed);
    CHECK(f.values[0] == rng.normal());
}

TEST_CASE("samplers are deterministic bit-for-bit") {
    const auto g = centered(4, 1.0);
    const int N = required_truncation(worst_corner_radius(g), 1e-6);
    const auto a = sample_bargmann_fock(g, N, RngSeed{5, 9, "bf"});
    const auto b = sample_bargmann_fock(g, N, RngSeed{5, 9, "bf"});
    CHECK(a.values == b.values);

    KernelSpec k;
    const auto c = sample_stationary_spectral(g, k, RngSeed{5, 9, "sp"});
    const auto d = sample_stationary_spectral(g, k, RngSeed{5, 9, "sp"});
    CHECK(c.values == d.values);
    CHECK(a.values != c.values);
}

TEST_CASE("Bargmann-Fock covariance: lag 0 and lag (1,0)") {
    const auto g = centered(3, 1.0);
    const int N = required_truncation(worst_corner_radius(g), 1e-6);
    const auto fields = bf_replicas(g, 1500, 77, N);

    const std::int64_t lag0[2] = {0, 0};
    const auto c0 = empirical_covariance(fields, lag0);
    CHECK(std::abs(c0.mean - 1.0) <= 4 * c0.stderr_);

    const std::int64_t lag1[2] = {1, 0};
    const auto c1 = empirical_covariance(fields, lag1);
    CHECK(std::abs(c1.mean - std::exp(-0.5)) <= 4 * c1.stderr_);
}

TEST_CASE("delta kernel gives i.i.d. unit normals") {
    const auto g = centered(8, 1.0);
    KernelSpec k;
    k.kind = KernelSpec::Kind::kDelta;
    const auto fields = spectral_replicas(g, k, 400, 31);
    const std::int64_t lag0[2] = {0, 0};
    const auto c0 = empirical_covariance(fields, lag0);
    CHECK(std::abs(c0.mean - 1.0) <= 4 * c0.stderr_);
    for (const std::array<std::int64_t, 2> lag : {std::array<std::int64_t, 2>{1, 0},
                                                  std::array<std::int64_t, 2>{0, 1},
                                                  std::array<std::int64_t, 2>{2, 2}}) {
        const auto c = empirical_covariance(fields, lag);
        CHECK(std::abs(c.mean) <= 4 * c.stderr_);
    }
}

TEST_CASE("spectral gaussian kernel matches exp(-k^2 h^2 / 2) and the series sampler") {
    const auto g = centered(3, 1.0);
    KernelSpec k;  // gaussian, length scale 1
    const auto sp = spectral_replicas(g, k, 1500, 99);
    const int N = required_truncation(worst_corner_radius(g), 1e-6);
    const auto bf = bf_replicas(g, 1500, 42, N);

    for (std::int64_t lag = 0; lag <= 3; ++lag) {
        const std::int64_t l[2] = {lag, 0};
        const auto cs = empirical_covariance(sp, l);
        const double want = std::exp(-0.5 * static_cast<double>(lag * lag));
        CHECK(std::abs(cs.mean - want) <= 4 * cs.stderr_);
        // cross-validation of the two samplers
        const auto cb = empirical_covariance(bf, l);
        const double se = std::hypot(cs.stderr_, cb.stderr_);
        CHECK(std::abs(cs.mean - cb.mean) <= 4 * se);
    }
}

TEST_CASE("embedding spectrum of the gaussian kernel on 64^2 is PSD") {
    GridSpec g;
    g.dim = 2;
    g.h = 0.25;
    g.extent = {64, 64, 1};
    g.origin = {-8, -8, 0};
    KernelSpec k;
    const auto info = spectral_embedding_info(g, k);
    CHECK(info.torus[0] >= 128);
    CHECK(info.min_eigenvalue >= -1e-10);
    CHECK(info.max_eigenvalue > 0);
}

TEST_CASE("indefinite tabulated kernel is a hard error naming the eigenvalue") {
    GridSpec g;
    g.dim = 2;
    g.h = 1.0;
    g.extent = {16, 16, 1};
    g.origin = {0, 0, 0};
    KernelSpec k;
    k.kind = KernelSpec::Kind::kTabulated;
    // hard cutoff: far from positive semidefinite
    k.table = {{0.0, 1.0}, {2.9, 1.0}, {3.0, 0.0}};
    try {
        sample_stationary_spectral(g, k, RngSeed{1, 0, "sp"});
        FAIL("expected embedding failure");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("eigenvalue") != std::string::npos);
        CHECK(msg.find("padding") != std::string::npos);
    }
}

TEST_CASE("empirical covariance edge cases") {
    const auto g = centered(2, 1.0);
    ScalarField zero;
    zero.grid = g;
    zero.values.assign(static_cast<std::size_t>(g.node_count()), 0.0);
    std::vector<ScalarField> zeros{zero, zero, zero};
    const std::int64_t lag0[2] = {0, 0};
    const auto c = empirical_covariance(zeros, lag0);
    CHECK(c.mean == 0.0);
    CHECK(c.stderr_ == 0.0);

    std::vector<ScalarField> one{zero};
    CHECK_THROWS(empirical_covariance(one, lag0));
    const std::int64_t big[2] = {99, 0};
    CHECK_THROWS(empirical_covariance(zeros, big));
}

TEST_CASE("lag-0 covariance of both samplers is within 4 stderr of 1 over 1000 replicas") {
    const auto g = centered(2, 1.0);
    const int N = required_truncation(worst_corner_radius(g), 1e-6);
    const auto bf = bf_replicas(g, 1000, 7, N);
    const std::int64_t lag0[2] = {0, 0};
    const auto cb = empirical_covariance(bf, lag0);
    CHECK(std::abs(cb.mean - 1.0) <= 4 * cb.stderr_);

    KernelSpec k;
    const auto sp = spectral_replicas(g, k, 1000, 8);
    const auto cs = empirical_covariance(sp, lag0);
    CHECK(std::abs(cs.mean - 1.0) <= 4 * cs.stderr_);
}

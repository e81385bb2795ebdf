#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "estimators.hpp"
#include "metric.hpp"

using namespace fpp;

namespace {

ModelSpec constant_model(double value, double h = 0.5) {
    ModelSpec m;
    m.kind = ModelKind::kConstant;
    m.constant_value = value;
    m.h = h;
    return m;
}

ModelSpec lattice_model(double p) {
    ModelSpec m;
    m.kind = ModelKind::kBernoulliLattice;
    m.p = p;
    m.law.kind = WeightLaw::Kind::kBernoulli;
    m.law.p = p;
    return m;
}

ModelSpec bf_model(double level, double h = 0.25) {
    ModelSpec m;
    m.kind = ModelKind::kSpectralGaussian;
    m.level = level;
    m.h = h;
    return m;
}

EstimatorOptions opts(int replicas, std::uint64_t seed, int threads = 2) {
    EstimatorOptions o;
    o.replicas = replicas;
    o.seed = seed;
    o.threads = threads;
    return o;
}

}  // namespace

TEST_CASE("mu on the graph-distance lattice is exactly 1 with zero stderr") {
    const auto curve =
        estimate_mu(lattice_model(0.0), {1, 0, 0}, {4, 8}, 12, opts(16, 1));
    for (const auto& pt : curve.points) {
        CHECK(pt.est.mean == 1.0);
        CHECK(pt.est.stderr_ == 0.0);
    }
    CHECK(curve.subadditive_ok);
}

TEST_CASE("mu on a constant density is exactly the density") {
    const auto curve =
        estimate_mu(constant_model(1.5), {1, 0, 0}, {4, 8}, 12, opts(8, 1));
    for (const auto& pt : curve.points) {
        CHECK(pt.est.mean == 1.5);
        CHECK(pt.est.stderr_ == 0.0);
    }
}

TEST_CASE("mu at p=0.25 reproduces across disjoint seeds within 3 stderr") {
    const auto a = estimate_mu(lattice_model(0.25), {1, 0, 0}, {32}, 40, opts(150, 11));
    const auto b = estimate_mu(lattice_model(0.25), {1, 0, 0}, {32}, 40, opts(150, 999));
    const double se = std::hypot(a.points[0].est.stderr_, b.points[0].est.stderr_);
    CHECK(a.points[0].est.mean > 0.0);
    CHECK(std::abs(a.points[0].est.mean - b.points[0].est.mean) <= 3 * se);
}

TEST_CASE("mu subadditive post-check holds on a random lattice") {
    const auto curve =
        estimate_mu(lattice_model(0.3), {1, 0, 0}, {8, 16, 24}, 30, opts(120, 5));
    CHECK(curve.subadditive_ok);
}

TEST_CASE("mu rejects targets outside the safe margin") {
    CHECK_THROWS_AS(estimate_mu(constant_model(1.0), {1, 0, 0}, {30}, 8, opts(4, 1)),
                    std::invalid_argument);
}

TEST_CASE("mu triangle-inequality audit on shared realizations") {
    const ModelSpec m = bf_model(0.5);
    Box domain;
    domain.dim = 2;
    domain.lo = {-12, -6, 0};
    domain.hi = {12, 6, 0};
    for (int r = 0; r < 5; ++r) {
        const auto sigma =
            realize_colouring(m, domain, 77, static_cast<std::uint32_t>(r), "audit");
        const auto a = sigma.grid.nearest_node({-8, 0, 0});
        const auto mid = sigma.grid.nearest_node({0, 0, 0});
        const auto b = sigma.grid.nearest_node({8, 0, 0});
        const double tab = point_time(sigma, a, b);
        const double t1 = point_time(sigma, a, mid);
        const double t2 = point_time(sigma, mid, b);
        CHECK(tab <= t1 + t2);
    }
}

TEST_CASE("one-arm on all-white space has probability 1 and refuses the fit") {
    const auto curve =
        estimate_one_arm(constant_model(0.0), {4, 8}, 12, 0, 1, opts(20, 3));
    for (const auto& pt : curve.points) CHECK(pt.prob.point() == 1.0);
    CHECK_FALSE(curve.exponent.has_value());
    CHECK(!curve.note.empty());
}

TEST_CASE("one-arm event equals the zero-time event sample by sample") {
    const ModelSpec m = bf_model(0.0);
    const Box domain = [] {
        Box b;
        b.dim = 2;
        b.lo = {-10, -10, 0};
        b.hi = {10, 10, 0};
        return b;
    }();
    AnnulusSpec an;
    an.inner = 1.0;
    an.outer = 8.0;
    for (int r = 0; r < 20; ++r) {
        const auto sigma =
            realize_colouring(m, domain, 55, static_cast<std::uint32_t>(r), "zp");
        CHECK(annulus_zero_crossing(sigma, an) == (annulus_time(sigma, an) == 0.0));
    }
}

TEST_CASE("critical bond one-arm exponent lands in (0,1)") {
    const auto curve =
        estimate_one_arm(lattice_model(0.5), {4, 8, 16}, 20, 0, 2, opts(800, 21));
    REQUIRE(curve.exponent.has_value());
    CHECK(curve.exponent->mean > 0.0);
    CHECK(curve.exponent->mean < 1.0);
}

TEST_CASE("crossing probabilities: trivial colours") {
    RectSpec rect;
    rect.box.dim = 2;
    rect.box.lo = {0, 0, 0};
    rect.box.hi = {1, 1, 0};
    rect.axis = 0;
    const auto white = estimate_crossing(constant_model(0.0), rect, {4, 8}, 0, opts(10, 2));
    for (const auto& pt : white) CHECK(pt.prob.point() == 1.0);
    const auto black = estimate_crossing(constant_model(1.0), rect, {4, 8}, 0, opts(10, 2));
    for (const auto& pt : black) CHECK(pt.prob.point() == 0.0);
}

TEST_CASE("ind: disjoint lattice regions are independent within 3 stderr") {
    const auto rep = estimate_ind(lattice_model(0.3), 4, 8, 0.5, opts(600, 17));
    CHECK(rep.pa.point() > 0.2);
    CHECK(rep.pa.point() < 0.95);
    CHECK(rep.defect.mean <= 3 * rep.defect.stderr_ + 1e-12);
}

TEST_CASE("ind: coincident annuli give p(1-p) exactly") {
    const auto rep = estimate_ind(lattice_model(0.3), 0, 8, 0.5, opts(400, 13));
    const double p = rep.pa.point();
    CHECK(rep.pb.point() == p);
    CHECK(rep.pab == p);
    CHECK(rep.defect.mean == doctest::Approx(p * (1 - p)).epsilon(0.15));
    CHECK(p > 0.1);
    CHECK(p < 0.95);
}

TEST_CASE("renorm scale arithmetic from the floor formulas") {
    // (Q,R,S) = (1,2,31): N = floor(30/5) = 6, n = floor(6*1/6) = 1
    const auto a = renorm_scales(1, 2, 31);
    CHECK(a.N == 6);
    CHECK(a.n == 1);
    // (4,8,401): N = floor(400/20) = 20, n = floor(20*4/24) = 3
    const auto b = renorm_scales(4, 8, 401);
    CHECK(b.N == 20);
    CHECK(b.n == 3);
    CHECK_THROWS(renorm_scales(4, 3, 41));
}

TEST_CASE("renorm verdict on a non-vacuous subcritical lattice triple") {
    const auto rep = check_renormalization(lattice_model(0.25), 2, 4, 101, 0.1, opts(300, 7));
    CHECK(rep.N == 10);
    CHECK(rep.n == 1);
    CHECK_FALSE(rep.vacuous);
    CHECK(rep.verdict == "holds");
    CHECK(rep.covering_count > 0);
    CHECK(rep.c_d > 0);
}

TEST_CASE("renorm vacuous case holds and says so") {
    // (2,4,41): N = 4, n = 0
    const auto rep = check_renormalization(lattice_model(0.25), 2, 4, 41, 0.1, opts(60, 9));
    CHECK(rep.N == 4);
    CHECK(rep.n == 0);
    CHECK(rep.vacuous);
    CHECK(rep.verdict == "holds");
    CHECK(rep.rhs == 1.0);
}

TEST_CASE("ball shape: unit density matches the chamfer ball") {
    const auto rep = ball_shape(constant_model(1.0, 1.0), {8, 12}, 16, 32, opts(3, 1));
    CHECK_FALSE(rep.vanishing_regime);
    // radius in the axis bin ~ 1, in the diagonal bin ~ 1/sqrt(2) ... up to
    // the octagon geometry; just check the profile is in [1/1.083, 1].
    for (const auto& e : rep.radius[1]) {
        CHECK(e.mean <= 1.0 + 1e-9);
        CHECK(e.mean >= 1.0 / kAnisotropyBound2D - 0.2);
    }
    CHECK(rep.hausdorff[1] <= rep.hausdorff[0] + 1e-9);
}

TEST_CASE("ball shape: zero density takes the vanishing branch") {
    const auto rep = ball_shape(constant_model(0.0, 0.5), {4}, 8, 32, opts(3, 1));
    CHECK(rep.vanishing_regime);
    CHECK(rep.growth_ratio[0] > 1.0);
    CHECK(!rep.note.empty());
}

TEST_CASE("estimates are reproducible for equal seeds") {
    const auto a = estimate_mu(lattice_model(0.25), {1, 0, 0}, {16}, 24, opts(50, 4));
    const auto b = estimate_mu(lattice_model(0.25), {1, 0, 0}, {16}, 24, opts(50, 4, 1));
    CHECK(a.points[0].est.mean == b.points[0].est.mean);
    CHECK(a.points[0].est.stderr_ == b.points[0].est.stderr_);
}

TEST_CASE("per-sample monotone couplings transfer to coupled mu estimates") {
    // Gaussian: shared field, two levels
    const ModelSpec g = bf_model(0.0);
    Box domain;
    domain.dim = 2;
    domain.lo = {-8, -4, 0};
    domain.hi = {8, 4, 0};
    for (int r = 0; r < 6; ++r) {
        const auto f = realize_field(g, domain, 31, static_cast<std::uint32_t>(r), "cpl");
        ModelSpec lo = g, hi = g;
        lo.level = -0.4;
        hi.level = 0.4;
        const auto clo = colouring_from_field(lo, f);
        const auto chi = colouring_from_field(hi, f);
        const auto a = clo.grid.nearest_node({-6, 0, 0});
        const auto b = clo.grid.nearest_node({6, 0, 0});
        CHECK(point_time(clo, a, b) <= point_time(chi, a, b));
    }
}

TEST_CASE("sphere covering counts scale like the sphere measure") {
    CHECK(sphere_covering_count(2, 0.4) == 1);
    const auto k10 = sphere_covering_count(2, 10);
    const auto k100 = sphere_covering_count(2, 100);
    CHECK(k10 >= 30);       // ~ pi * rho
    CHECK(k10 <= 40);
    CHECK(k100 >= 310);
    CHECK(k100 <= 330);
    CHECK(sphere_covering_count(3, 10) > 100);
}

TEST_CASE("convex hull and polygon hausdorff basics") {
    std::vector<std::array<double, 2>> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
    const auto hull = convex_hull(square);
    CHECK(hull.size() == 4);
    std::vector<std::array<double, 2>> a{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<std::array<double, 2>> b{{0, 0}, {1.1, 0}, {1.1, 1}, {0, 1}};
    const double h = polygon_hausdorff(a, b);
    CHECK(h == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("critical gaussian square crossings stay in the RSW band") {
    RectSpec rect;
    rect.box.dim = 2;
    rect.box.lo = {0, 0, 0};
    rect.box.hi = {1, 1, 0};
    rect.axis = 0;
    const auto pts = estimate_crossing(bf_model(0.0), rect, {8, 16, 32}, 0, opts(200, 77));
    for (const auto& pt : pts) {
        CHECK(pt.prob.point() >= 0.2);
        CHECK(pt.prob.point() <= 0.8);
    }
}

TEST_CASE("mu handles odd n on the lattice without inflating the separation") {
    const auto curve = estimate_mu(lattice_model(0.0), {1, 0, 0}, {5, 7}, 10, opts(6, 2));
    for (const auto& pt : curve.points) {
        CHECK(pt.est.mean == 1.0);  // graph distance / n exactly
        CHECK(pt.est.stderr_ == 0.0);
    }
}

// The multiscale schedule Q = R^(1-eps/2), S = R^(1+eps) keeps the shell
// counts in fixed power-law brackets once R is large; spot-check the
// bookkeeping at a few decades.
TEST_CASE("multiscale schedule brackets for N and n") {
    const double eps = 0.5;
    for (double R : {1e4, 1e5, 1e6}) {
        const double Q = std::pow(R, 1.0 - eps / 2);
        const double S = std::pow(R, 1.0 + eps);
        const auto sc = renorm_scales(Q, R, S);
        const double re = std::pow(R, eps), rh = std::pow(R, eps / 2);
        CHECK(static_cast<double>(sc.N) >= re / 4);
        CHECK(static_cast<double>(sc.N) <= re / 2);
        CHECK(static_cast<double>(sc.n) >= rh / 8);
        CHECK(static_cast<double>(sc.n) <= rh / 4);
    }
}

TEST_CASE("fitted ball is symmetric under v -> -v") {
    const auto rep = ball_shape(constant_model(1.0, 1.0), {10}, 14, 32, opts(2, 6));
    REQUIRE_FALSE(rep.vanishing_regime);
    for (const auto& v : rep.fitted_k) {
        bool found = false;
        for (const auto& w : rep.fitted_k)
            if (std::abs(v[0] + w[0]) < 1e-12 && std::abs(v[1] + w[1]) < 1e-12) found = true;
        CHECK(found);
    }
}

TEST_CASE("one-arm rejects oversized radii and bad fit windows") {
    CHECK_THROWS_AS(
        estimate_one_arm(lattice_model(0.5), {4, 8, 64}, 20, 0, 2, opts(4, 1)),
        std::invalid_argument);
    CHECK_THROWS_AS(estimate_one_arm(lattice_model(0.5), {4, 8}, 20, 0, 5, opts(4, 1)),
                    std::invalid_argument);
}

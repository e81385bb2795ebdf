#include <doctest.h>

#include <cmath>
#include <vector>

#include "rng.hpp"

using namespace fpp;

TEST_CASE("identical seed triples reproduce identical draws") {
    RngStream a(42, 7, "fields/bf");
    RngStream b(42, 7, "fields/bf");
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    RngStream c(42, 7, "fields/bf");
    RngStream d(42, 7, "fields/bf");
    for (int i = 0; i < 100; ++i) CHECK(c.normal() == d.normal());
}

TEST_CASE("streams with different replica or label are distinct") {
    RngStream a(42, 0, "x");
    RngStream b(42, 1, "x");
    RngStream c(42, 0, "y");
    int equal_ab = 0, equal_ac = 0;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        if (va == b.next_u64()) ++equal_ab;
        if (va == c.next_u64()) ++equal_ac;
    }
    CHECK(equal_ab == 0);
    CHECK(equal_ac == 0);
}

// Frozen first draws for a fixed seed triple; guards the counter/key wiring
// against accidental changes. (Values recorded from this implementation.)
TEST_CASE("generator output is stable across builds") {
    RngStream s(0x0123456789abcdefull, 3, "regression");
    CHECK(s.next_u64() == 0x97f1f9ca35952c10ull);
    CHECK(s.next_u64() == 0x4ed9b2f6a9bb5a98ull);
}

TEST_CASE("uniforms and normals have sane moments") {
    RngStream s(2024, 0, "moments");
    const int n = 200000;
    double su = 0, su2 = 0, sn = 0, sn2 = 0, sn4 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        su += u;
        su2 += u * u;
        const double z = s.normal();
        sn += z;
        sn2 += z * z;
        sn4 += z * z * z * z;
    }
    CHECK(std::abs(su / n - 0.5) < 0.005);
    CHECK(std::abs(su2 / n - 1.0 / 3.0) < 0.005);
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(std::abs(sn2 / n - 1.0) < 0.02);
    CHECK(std::abs(sn4 / n - 3.0) < 0.1);
}

TEST_CASE("lagged self-correlation of one stream is negligible") {
    RngStream s(99, 5, "corr");
    const int n = 100000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = s.uniform() - 0.5;
    for (int lag : {1, 2, 7, 64}) {
        double acc = 0;
        for (int i = 0; i + lag < n; ++i)
            acc += xs[static_cast<std::size_t>(i)] * xs[static_cast<std::size_t>(i + lag)];
        acc /= (n - lag);
        CHECK(std::abs(acc) < 0.003);  // var is 1/12, so this is ~4 sd
    }
}

TEST_CASE("coordinate hash is deterministic and label-separated") {
    const std::array<double, 3> p{1.25, -3.5, 0.0};
    const double u1 = coordinate_hash_uniform(7, "voronoi-cell", p, 2);
    const double u2 = coordinate_hash_uniform(7, "voronoi-cell", p, 2);
    CHECK(u1 == u2);
    CHECK(u1 >= 0.0);
    CHECK(u1 < 1.0);
    CHECK(coordinate_hash_uniform(7, "boolean-radius", p, 2) != u1);
    CHECK(coordinate_hash_uniform(8, "voronoi-cell", p, 2) != u1);
}

TEST_CASE("coordinate hash values look uniform") {
    int buckets[10] = {0};
    const int n = 20000;
    RngStream pos(1, 0, "positions");
    for (int i = 0; i < n; ++i) {
        const std::array<double, 3> p{pos.uniform() * 100, pos.uniform() * 100, 0};
        const double u = coordinate_hash_uniform(11, "voronoi-cell", p, 2);
        ++buckets[static_cast<int>(u * 10)];
    }
    for (int b = 0; b < 10; ++b) CHECK(std::abs(buckets[b] - n / 10) < 5 * std::sqrt(n / 10.0));
}

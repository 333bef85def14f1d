#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cuspforge/geometry.hpp"

using namespace cuspforge;

namespace {

std::mt19937 rng(20240917);

cx random_cx(double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    return {d(rng), d(rng)};
}

ExtendedIsometry random_isometry(bool conjugates) {
    for (;;) {
        cx a = random_cx(), b = random_cx(), c = random_cx(), d = random_cx();
        if (std::abs(a * d - b * c) > 0.1)
            return make_isometry(a, b, c, d, conjugates);
    }
}

// the geometric edge invariant of an ideal tetrahedron is the member of
// {q, 1/q} in the upper half plane
cx uhp_invariant(cx q) {
    return q.imag() > 0.0 ? q : 1.0 / q;
}

}  // namespace

TEST_CASE("shape triple of the regular tetrahedron repeats itself") {
    cx z0(0.5, std::sqrt(3.0) / 2.0);
    auto t = shape_triple(z0);
    CHECK(std::abs(t[0] - z0) < 1e-15);
    CHECK(std::abs(t[1] - z0) < 1e-14);
    CHECK(std::abs(t[2] - z0) < 1e-14);
}

TEST_CASE("shape triple at 2i") {
    auto t = shape_triple(cx(0.0, 2.0));
    CHECK(std::abs(t[0] - cx(0.0, 2.0)) == 0.0);
    CHECK(std::abs(t[1] - cx(0.2, 0.4)) < 1e-15);
    CHECK(std::abs(t[2] - cx(1.0, 0.5)) < 1e-15);
    CHECK(std::abs(t[0] * t[1] * t[2] + 1.0) < 1e-15);
}

TEST_CASE("shape triple rejects degenerate parameters") {
    CHECK_THROWS_AS(shape_triple(cx(0.0)), DegenerateShapeError);
    CHECK_THROWS_AS(shape_triple(cx(1.0)), DegenerateShapeError);
    CHECK_THROWS_AS(shape_triple(cx(1.0 / 0.0, 0.0)), DegenerateShapeError);
}

TEST_CASE("shape triple stays in the upper half plane with angle sum pi") {
    for (int i = 0; i < 200; ++i) {
        cx z = random_cx();
        z = {z.real(), std::abs(z.imag()) + 1e-3};
        auto t = shape_triple(z);
        double sum = 0.0;
        for (cx v : t) {
            CHECK(v.imag() > 0.0);
            sum += std::arg(v);
        }
        CHECK(sum == doctest::Approx(kPi).epsilon(1e-12));
    }
}

TEST_CASE("conjugation squares to the identity") {
    auto c = conjugation_isometry();
    CHECK(isometry_distance(compose(c, c), identity_isometry()) < 1e-15);
}

TEST_CASE("identity is neutral for composition") {
    for (int i = 0; i < 20; ++i) {
        auto g = random_isometry(i % 2 == 0);
        CHECK(isometry_distance(compose(g, identity_isometry()), g) < 1e-12);
        CHECK(isometry_distance(compose(identity_isometry(), g), g) < 1e-12);
        CHECK(isometry_distance(compose(g, inverse(g)), identity_isometry()) < 1e-12);
    }
}

TEST_CASE("composition is associative") {
    for (int i = 0; i < 50; ++i) {
        auto g = random_isometry(i % 2 == 0);
        auto h = random_isometry(i % 3 == 0);
        auto k = random_isometry(i % 5 == 0);
        CHECK(isometry_distance(compose(compose(g, h), k),
                                compose(g, compose(h, k))) < 1e-12);
    }
}

TEST_CASE("composition matches the pointwise action") {
    for (int i = 0; i < 50; ++i) {
        auto g = random_isometry(i % 2 == 0);
        auto h = random_isometry(i % 3 != 0);
        SpherePoint p = (i % 7 == 0) ? SpherePoint::infinity() : SpherePoint(random_cx());
        SpherePoint lhs = apply(compose(g, h), p);
        SpherePoint rhs = apply(g, apply(h, p));
        CHECK(sphere_distance(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("apply handles the point at infinity") {
    auto swap = make_isometry(0.0, 1.0, 1.0, 0.0);  // z -> 1/z
    CHECK(apply(swap, SpherePoint::infinity()).value == cx(0.0));
    CHECK(apply(swap, SpherePoint(cx(0.0))).infinite);

    auto shift = make_isometry(1.0, 5.0, 0.0, 1.0);  // z -> z + 5
    CHECK(apply(shift, SpherePoint::infinity()).infinite);
}

TEST_CASE("normalization pins the sign deterministically") {
    auto g = make_isometry(-1.0, 0.0, 0.0, -1.0);
    CHECK(std::abs(g.a - 1.0) < 1e-15);
    auto h = make_isometry(cx(0.0, -2.0), 0.0, 0.0, cx(0.0, -0.5));
    CHECK(std::arg(h.a) >= 0.0);
    CHECK(std::arg(h.a) < kPi);
}

TEST_CASE("trace invariant on reference elements") {
    CHECK(std::abs(trace_invariant(identity_isometry())) == 0.0);

    // translation length 0.6 along a geodesic: diag(e^0.3, e^-0.3)
    auto loxo = make_isometry(std::exp(0.3), 0.0, 0.0, std::exp(-0.3));
    CHECK(trace_invariant(loxo).real() ==
          doctest::Approx(0.37093043648453533).epsilon(1e-14));
    CHECK(std::abs(trace_invariant(loxo).imag()) < 1e-15);

    // half turn: z -> -z has matrix diag(i, -i), trace 0
    auto half = make_isometry(cx(0.0, 1.0), 0.0, 0.0, cx(0.0, -1.0));
    CHECK(trace_invariant(half).real() == doctest::Approx(-4.0));
}

TEST_CASE("trace invariant rejects orientation-reversing input") {
    CHECK_THROWS_AS(trace_invariant(conjugation_isometry()), OrientationTypeError);
}

TEST_CASE("trace invariant transforms predictably under conjugation") {
    for (int i = 0; i < 40; ++i) {
        auto g = random_isometry(false);
        cx ig = trace_invariant(g);

        auto h = random_isometry(false);
        cx ip = trace_invariant(compose(compose(h, g), inverse(h)));
        CHECK(std::abs(ip - ig) < 1e-10);

        // a reversing conjugator conjugates the invariant
        auto r = random_isometry(true);
        cx ir = trace_invariant(compose(compose(r, g), inverse(r)));
        CHECK(std::abs(ir - std::conj(ig)) < 1e-10);
    }
}

TEST_CASE("cross-ratio of the standard placement recovers the shape") {
    cx z = random_cx();
    z = {z.real(), std::abs(z.imag()) + 0.2};
    cx q = cross_ratio(SpherePoint(0.0), SpherePoint(1.0),
                       SpherePoint::infinity(), SpherePoint(z));
    CHECK(std::abs(q - z) < 1e-14);
}

TEST_CASE("mirroring a tetrahedron sends its edge invariant to 1/conj") {
    for (int i = 0; i < 30; ++i) {
        cx z = random_cx();
        z = {z.real(), std::abs(z.imag()) + 0.1};
        cx q = uhp_invariant(cross_ratio(SpherePoint(0.0), SpherePoint(1.0),
                                         SpherePoint::infinity(), SpherePoint(z)));
        // conjugate every vertex position (infinity is fixed)
        cx m = uhp_invariant(cross_ratio(SpherePoint(0.0), SpherePoint(1.0),
                                         SpherePoint::infinity(),
                                         SpherePoint(std::conj(z))));
        CHECK(std::abs(m - 1.0 / std::conj(q)) < 1e-12);
    }
}

TEST_CASE("compose of reversing elements is preserving") {
    auto u = random_isometry(true);
    auto v = random_isometry(true);
    CHECK_FALSE(compose(u, v).conjugates);
    CHECK(compose(u, identity_isometry()).conjugates);
}

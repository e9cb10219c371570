#include "doctest.h"
#include "looplab/geometry.hpp"

#include <cmath>

using namespace looplab;

namespace {
PolygonalLoop unit_square() { return PolygonalLoop({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}); }
bool same(const Vec3& a, const Vec3& b, double tol = 0.0) { return norm(a - b) <= tol; }
}  // namespace

TEST_SUITE("geometry") {
    TEST_CASE("edges are cyclic differences") {
        const PolygonalLoop C = unit_square();
        CHECK(same(edge(C, 0), {1, 0, 0}));
        CHECK(same(edge(C, 3), {0, -1, 0}));
        CHECK(same(edge(C, -1), edge(C, 3)));
    }

    TEST_CASE("edges telescope to zero") {
        const PolygonalLoop C({{0.3, 1.7, -2}, {1, 0.2, 0}, {4, 1, 1}, {-1, 2, 0.5}, {0.1, 0.1, 0.1}});
        Vec3 s;
        for (int k = 0; k < C.size(); ++k) s += edge(C, k);
        CHECK(norm(s) <= 1e-15);
    }

    TEST_CASE("arc length") {
        const PolygonalLoop C = unit_square();
        CHECK(arc_length(C, 0, 3) == doctest::Approx(4.0));
        CHECK(arc_length(C, 0, 0) == doctest::Approx(1.0));
        std::vector<Vec3> hex;
        for (int k = 0; k < 6; ++k) hex.push_back({std::cos(kPi * k / 3), std::sin(kPi * k / 3), 0});
        CHECK(arc_length(PolygonalLoop(hex), 0, 5) == doctest::Approx(6.0).epsilon(1e-14));
    }

    TEST_CASE("area vector of the unit circle") {
        const Vec3 A = area_vector(circle_curve({0, 0, 0}, 1.0, {0, 0, 1}));
        CHECK(same(A, {0, 0, -2 * kPi}, 1e-12));
        CHECK(norm(area_vector(constant_curve({1, 2, 3}))) == 0.0);
    }

    TEST_CASE("area vector of a convex polygon is twice the shoelace area") {
        const std::vector<Vec3> P = {{0, 0, 0}, {2, 0, 0}, {3, 1, 0}, {1.5, 2.5, 0}, {-0.5, 1, 0}};
        double shoelace = 0.0;
        for (std::size_t i = 0; i < P.size(); ++i) {
            const Vec3& a = P[i];
            const Vec3& b = P[(i + 1) % P.size()];
            shoelace += 0.5 * (a[0] * b[1] - b[0] * a[1]);
        }
        CHECK(norm(area_vector(polygon_curve(P))) == doctest::Approx(2.0 * std::abs(shoelace)).epsilon(1e-8));
    }

    TEST_CASE("discretized circle") {
        const Discretization d = discretize_curve(circle_curve({0, 0, 0}, 1.0), 64);
        CHECK(d.max_edge == doctest::Approx(2.0 * std::sin(kPi / 64)).epsilon(1e-12));
        CHECK(d.M == doctest::Approx(2.0 * kPi).epsilon(1e-3));
        Vec3 s;
        for (int k = 0; k < 64; ++k) s += edge(d.loop, k);
        CHECK(norm(s) <= 1e-14);
    }

    TEST_CASE("square sampler recovers its corners") {
        const std::vector<Vec3> P = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
        const PolygonalLoop C = discretize_curve(polygon_curve(P), 4).loop;
        for (int k = 0; k < 4; ++k) CHECK(same(C.vertex(k), P[k], 1e-15));
    }

    TEST_CASE("plane basis is orthonormal") {
        Vec3 e1, e2;
        const Vec3 n = Vec3{0.2, 0.3, 1} / norm(Vec3{0.2, 0.3, 1});
        plane_basis(n, e1, e2);
        CHECK(std::abs(dot(e1, n)) <= 1e-15);
        CHECK(std::abs(dot(e2, n)) <= 1e-15);
        CHECK(std::abs(dot(e1, e2)) <= 1e-15);
        CHECK(norm(e1) == doctest::Approx(1.0));
    }
}

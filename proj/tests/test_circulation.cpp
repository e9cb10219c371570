#include "doctest.h"
#include "looplab/circulation.hpp"
#include "looplab/fd.hpp"
#include "looplab/quadrature.hpp"
#include "looplab/rng.hpp"

#include <cmath>

using namespace looplab;

namespace {
PolygonalLoop unit_square() { return PolygonalLoop({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}); }

PolygonalLoop wobbly(int N, std::uint64_t seed) {
    CounterRng r(seed);
    PolygonalLoop C = discretize_curve(circle_curve({0.1, -0.2, 0.3}, 1.0, Vec3{0.2, 0.3, 1} / norm(Vec3{0.2, 0.3, 1})), N).loop;
    for (int k = 0; k < N; ++k) C.vertex_mut(k) += r.uniform_vec(-0.05, 0.05);
    return C;
}

AnalyticField wave() {
    return single_mode_field(make_wave_mode(CVec3{Vec3{1, 0, 0}, Vec3{0, 0.5, -0.8}}, Vec3{0, 0.8, 0.5}));
}
}  // namespace

TEST_SUITE("circulation") {
    TEST_CASE("circulation examples") {
        CHECK(std::abs(circulation(constant_field({1, 2, 3}), wobbly(12, 1), 0.0)) <= 1e-14);
        CHECK(circulation(rotation_field(), unit_square(), 0.0) == doctest::Approx(2.0).epsilon(1e-14));
        // u = (0, 0, cos x1) on the square in the x1-x3 plane
        AnalyticField f = single_mode_field(make_wave_mode(CVec3{Vec3{0, 0, 1}, Vec3{}}, {1, 0, 0}));
        const PolygonalLoop C({{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1}});
        // cos(1) up the side x1 = 1, minus 1 down the side x1 = 0
        CHECK(circulation(f, C, 0.0) == doctest::Approx(std::cos(1.0) - 1.0).epsilon(1e-13));
    }

    TEST_CASE("exact and Gauss segment moments agree") {
        const AnalyticField f = mixed_test_field();
        const SegmentMoments a = segment_moments_exact(f, {0.1, 0.2, 0.3}, {0.7, -0.4, 0.9}, 0.0);
        const SegmentMoments b = segment_moments_gauss(f, {0.1, 0.2, 0.3}, {0.7, -0.4, 0.9}, 0.0, 16);
        CHECK(norm(a.u0 - b.u0) <= 1e-13);
        CHECK(norm(a.w0() - b.w0()) <= 1e-13);
    }

    TEST_CASE("loop functional") {
        CHECK(std::abs(loop_functional_sample(constant_field({1, 2, 3}), unit_square(), 0, 1, 1).value - cplx(1, 0)) <= 1e-14);
        CHECK(std::abs(loop_functional_sample(rotation_field(), unit_square(), 0, 1, 1).value - std::exp(cplx(0, 2))) <= 1e-14);
        CHECK(std::abs(loop_functional_sample(mixed_test_field(), wobbly(16, 3), 0, 1.3, 0.4).value) ==
              doctest::Approx(1.0).epsilon(1e-15));
    }

    TEST_CASE("circulation gradient") {
        const PolygonalLoop C = wobbly(10, 4);
        CHECK(norm(gamma_gradient(constant_field({1, 2, 3}), C, 3, 0.0)) <= 1e-14);
        for (const AnalyticField& f : {rotation_field(), wave()}) {
            const PolygonalLoop S = unit_square();
            for (int k = 0; k < 4; ++k) {
                const Vec3 g = gamma_gradient(f, S, k, 0.0);
                for (int a = 0; a < 3; ++a) {
                    const double d = central_derivative<double>(
                        [&](double h) {
                            PolygonalLoop P = S;
                            P.vertex_mut(k)[a] += h;
                            return circulation(f, P, 0.0);
                        },
                        1e-3, 3);
                    CHECK(std::abs(g[a] - d) <= 1e-8 * std::max(1.0, std::abs(d)));
                }
            }
        }
    }

    TEST_CASE("gradient locality is exact") {
        const AnalyticField f = wave();
        const PolygonalLoop C = wobbly(10, 5);
        const Vec3 g = gamma_gradient(f, C, 4, 0.0);
        for (int j : {0, 1, 2, 6, 7, 8, 9}) {
            PolygonalLoop P = C;
            P.vertex_mut(j) += Vec3{0.1, -0.2, 0.05};
            const Vec3 h = gamma_gradient(f, P, 4, 0.0);
            CHECK(h[0] == g[0]);
            CHECK(h[1] == g[1]);
            CHECK(h[2] == g[2]);
        }
    }

    TEST_CASE("median segment average") {
        const PolygonalLoop C = wobbly(10, 6);
        CHECK(norm(segment_average(rotation_field(), C, 2, 0.0) - Vec3{0, 0, 2}) <= 1e-14);
        // wave field against a refined reference on the median segment
        const AnalyticField f = wave();
        const Vec3 A = C.vertex(2), B = 0.5 * (C.vertex(1) + C.vertex(3));
        const GaussRule& r = gauss01(64);
        Vec3 ref;
        for (int i = 0; i < r.size(); ++i) ref += r.w[i] * eval_vorticity(f, A + r.x[i] * (B - A), 0.0);
        CHECK(norm(segment_average(f, C, 2, 0.0) - ref) <= 1e-10);
    }

    TEST_CASE("area derivative") {
        const PolygonalLoop C = wobbly(12, 7);
        for (int k = 0; k < 12; ++k) {
            const AreaDerivative a = area_derivative_exact(rotation_field(), C, k, 0.0);
            CHECK(norm(a.value + Vec3{0, 0, 2}) <= 1e-12);
            CHECK(norm(a.r_ad) <= 1e-12);
        }
        CHECK(norm(area_derivative_exact(constant_field({1, 2, 3}), C, 2, 0.0).value) <= 1e-14);
    }

    TEST_CASE("area-derivative remainder shrinks linearly with the edge length") {
        const AnalyticField f = wave();
        std::vector<double> hs, rs;
        for (int j = 2; j <= 7; ++j) {
            const double h = std::ldexp(1.0, -j);
            const PolygonalLoop C({{0, 0, 0}, {h, 0.3 * h, 0}, {1.7 * h, 1.1 * h, 0.2 * h}, {0.2 * h, 1.4 * h, -0.1 * h}});
            hs.push_back(h);
            rs.push_back(norm(area_derivative_exact(f, C, 1, 0.0).r_ad));
        }
        double slope = std::log(rs.front() / rs.back()) / std::log(hs.front() / hs.back());
        CHECK(slope >= 0.9);
    }

    TEST_CASE("time derivative of the loop functional") {
        const double nu = 0.5, gamma = 1.3;
        const AnalyticField f = abc_field(1, 0.8, 0.6, TimeLaw::beltrami(1.0, nu));
        const PolygonalLoop C = wobbly(16, 8);
        const double t = 0.4;
        const cplx d = dt_loop_functional(f, C, t, gamma, nu);
        const cplx fd = central_derivative<cplx>(
            [&](double h) { return loop_functional_sample(f, C, t + h, gamma, nu).value; }, 1e-2, 3);
        CHECK(std::abs(d - fd) <= 1e-6 * std::abs(d));
        // Beltrami: (i gamma/nu)(-nu Gamma) Psi
        const LoopFunctionalValue v = loop_functional_sample(f, C, t, gamma, nu);
        CHECK(std::abs(d - cplx(0, gamma / nu) * (-nu * v.gamma_circ) * v.value) <= 1e-12);
        CHECK_THROWS_AS(dt_loop_functional(constant_field({1, 1, 1}), C, 0, gamma, nu), std::invalid_argument);
    }
}

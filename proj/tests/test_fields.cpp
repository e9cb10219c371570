#include "doctest.h"
#include "looplab/fd.hpp"
#include "looplab/fields.hpp"
#include "looplab/rng.hpp"

#include <cmath>

using namespace looplab;

TEST_SUITE("fields") {
    TEST_CASE("closed-form velocities") {
        CHECK(norm(eval_velocity(constant_field({1, 2, 3}), {5, -1, 2}, 0.0) - Vec3{1, 2, 3}) == 0.0);
        CHECK(norm(eval_velocity(rotation_field(), {1, 0, 0}, 0.0) - Vec3{0, 1, 0}) <= 1e-15);
        CHECK(norm(eval_velocity(abc_field(1, 1, 1), {0, 0, 0}, 0.0) - Vec3{1, 1, 1}) <= 1e-15);
    }

    TEST_CASE("vorticity of simple fields") {
        CHECK(norm(eval_vorticity(rotation_field(), {0.3, -2, 1}, 0.0) - Vec3{0, 0, 2}) <= 1e-15);
        const Mat3 W = eval_grad_vorticity(rotation_field(), {0.3, -2, 1}, 0.0);
        for (double v : W.a) CHECK(v == 0.0);
        CHECK(norm(eval_vorticity(constant_field({1, 2, 3}), {0, 0, 0}, 0.0)) == 0.0);
    }

    TEST_CASE("ABC flow is Beltrami") {
        const AnalyticField f = abc_field(1, 0.8, 0.6);
        CounterRng r(5);
        for (int i = 0; i < 20; ++i) {
            const Vec3 x = r.uniform_vec(-3, 3);
            CHECK(norm(eval_vorticity(f, x, 0) - eval_velocity(f, x, 0)) <= 1e-14);
        }
    }

    TEST_CASE("derivatives agree with central differences") {
        const AnalyticField f = mixed_test_field();
        CounterRng r(17);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vec3 x = r.uniform_vec(-2, 2);
            const Mat3 G = eval_grad_velocity(f, x, 0.0);
            for (int a = 0; a < 3; ++a) {
                Vec3 e;
                e[a] = 1.0;
                const Vec3 d = central_derivative<Vec3>(
                    [&](double h) { return eval_velocity(f, x + h * e, 0.0); }, 1e-3, 2);
                for (int m = 0; m < 3; ++m)
                    worst = std::max(worst, std::abs(d[m] - G(a, m)) / std::max(1.0, std::abs(G(a, m))));
                const Vec3 dw = central_derivative<Vec3>(
                    [&](double h) { return eval_vorticity(f, x + h * e, 0.0); }, 1e-3, 2);
                const Mat3 W = eval_grad_vorticity(f, x, 0.0);
                for (int m = 0; m < 3; ++m)
                    worst = std::max(worst, std::abs(dw[m] - W(a, m)) / std::max(1.0, std::abs(W(a, m))));
            }
        }
        CHECK(worst <= 1e-7);
    }

    TEST_CASE("decaying ABC solves Navier-Stokes") {
        const double nu = 0.3;
        const AnalyticField f = abc_field(1, 0.8, 0.6, TimeLaw::beltrami(1.0, nu));
        CounterRng r(3);
        for (int i = 0; i < 20; ++i) CHECK(norm(ns_residual(f, r.uniform_vec(-3, 3), r.uniform(0, 2), nu)) <= 1e-10);
    }

    TEST_CASE("a wrong decay rate is detected") {
        const double nu = 0.1;
        CHECK_THROWS_AS(abc_field(1, 1, 1, TimeLaw::beltrami(std::sqrt(2.0), nu)), std::invalid_argument);
    }

    TEST_CASE("wave modes must be transverse") {
        CHECK_THROWS_AS(make_wave_mode(CVec3{Vec3{0, 0, 1}, Vec3{}}, {0, 0, 1}), std::invalid_argument);
        CHECK_NOTHROW(make_wave_mode(CVec3{Vec3{1, 0, 0}, Vec3{}}, {0, 0, 1}));
    }

    TEST_CASE("derivative bounds") {
        const AnalyticField f = single_mode_field(make_wave_mode(CVec3{Vec3{1, 0, 0}, Vec3{}}, {0, 0, 2}));
        // |w| = |a||v0| = 2 and each further derivative brings a factor |a|
        const FieldBounds b = field_bounds(f, 1);
        CHECK(b.d_omega[1] == doctest::Approx(4.0));
        CHECK(field_bounds(constant_field({1, 2, 3}), 3).d_omega[3] == 0.0);
        CounterRng r(8);
        double sup = 0.0;
        for (int i = 0; i < 10000; ++i) sup = std::max(sup, omega_derivative_norm(f, r.uniform_vec(-5, 5), 0.0, 1));
        CHECK(sup <= b.d_omega[1] * (1 + 1e-12));
    }
}

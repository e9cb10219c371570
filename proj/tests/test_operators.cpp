#include "doctest.h"
#include "looplab/loop_operators.hpp"
#include "looplab/rng.hpp"

#include <cmath>

using namespace looplab;

namespace {
PolygonalLoop wobbly(int N, std::uint64_t seed) {
    CounterRng r(seed);
    PolygonalLoop C = discretize_curve(circle_curve({0.1, -0.2, 0.3}, 1.0, Vec3{0.2, 0.3, 1} / norm(Vec3{0.2, 0.3, 1})), N).loop;
    for (int k = 0; k < N; ++k) C.vertex_mut(k) += r.uniform_vec(-0.05, 0.05);
    return C;
}
AnalyticField wave() {
    return single_mode_field(make_wave_mode(CVec3{Vec3{1, 0, 0}, Vec3{0, 0.5, -0.8}}, Vec3{0, 0.8, 0.5}));
}
OperatorParams params(int N, double alpha = 0.5) {
    OperatorParams p;
    p.gamma = 2.0;
    p.nu = 0.5;
    p.alpha = alpha;
    p.N = N;
    return p;
}
double rel(const CVec3& a, const CVec3& b) { return norm(a - b) / std::max(norm(b), 1e-8); }
}  // namespace

TEST_SUITE("loop_operators") {
    TEST_CASE("constant field is annihilated") {
        const AnalyticField f = constant_field({0.3, -1, 0.7});
        const PolygonalLoop C = wobbly(16, 1);
        const OperatorParams p = params(16);
        CHECK(norm(vorticity_op(f, C, 3, 0, p).value) == 0.0);
        CHECK(norm(diffusion_op(f, C, 3, 0, p).value) == 0.0);
        CHECK(norm(extended_vorticity_op(f, C, 3, 0, p).value) == 0.0);
        CHECK(norm(advection_op(f, C, 3, 0, p).value) == 0.0);
        const OperatorResult U = velocity_op(f, C, 3, 0, p);
        CHECK(norm(U.value) == 0.0);
        CHECK(norm(U.part("r_total")) == doctest::Approx(norm(Vec3{0.3, -1, 0.7})));
    }

    TEST_CASE("rotation field vorticity action") {
        const PolygonalLoop C = wobbly(16, 2);
        const OperatorParams p = params(16);
        const AnalyticField f = rotation_field();
        for (int k : {0, 5, 11}) {
            const OperatorResult r = vorticity_op(f, C, k, 0, p);
            CHECK(norm(r.part("omega_avg") - CVec3{Vec3{0, 0, 2}}) <= 1e-14);
            CHECK(norm(r.part("minus_r_ad")) <= 1e-12);
            const double kappa = p.gamma / p.nu;
            const Vec3 g1 = gamma_gradient(f, C, k + 1, 0), g0 = gamma_gradient(f, C, k, 0);
            CHECK(norm(r.part("cross") - CVec3{Vec3{}, -kappa * cross(g1, g0)}) <= 1e-12);
            const OperatorResult m = extended_vorticity_op(f, C, k == 0 ? 1 : k, 0, p);
            CHECK(norm(m.part("omega_avg") - CVec3{Vec3{0, 0, 2}}) <= 1e-14);
        }
    }

    TEST_CASE("finite-difference oracles on a wave field") {
        const AnalyticField f = wave();
        const PolygonalLoop C = wobbly(16, 3);
        const OperatorParams p = params(16);
        for (int k : {1, 7, 14}) {
            CHECK(rel(vorticity_op(f, C, k, 0, p).value, vorticity_fd(f, C, k, 0, p)) <= 1e-5);
            CHECK(rel(diffusion_op(f, C, k, 0, p).value, diffusion_fd(f, C, k, 0, p)) <= 1e-5);
            CHECK(rel(extended_vorticity_op(f, C, k, 0, p).value, extended_vorticity_fd(f, C, k, 0, p)) <= 1e-5);
            CHECK(rel(extended_diffusion_op(f, C, k, 0, p).value, extended_diffusion_fd(f, C, k, 0, p)) <= 1e-5);
            const Vec3 y = C.vertex(k) + Vec3{0.05, -0.02, 0.03};
            CHECK(rel(velocity_integrand(f, C, k, y, 0, p), velocity_integrand_fd(f, C, k, y, 0, p)) <= 1e-5);
        }
    }

    TEST_CASE("diffusion leading term on decaying ABC") {
        const double nu = 0.5;
        const AnalyticField f = abc_field(1, 0.8, 0.6, TimeLaw::beltrami(1.0, nu));
        const PolygonalLoop C = wobbly(32, 4);
        const OperatorResult r = diffusion_op(f, C, 4, 0.3, params(32));
        // curl w = lambda^2 u for a Beltrami field with lambda = 1
        CHECK(norm(r.part("leading") - CVec3{eval_velocity(f, C.vertex(4), 0.3)}) <= 1e-14);
    }

    TEST_CASE("advection on a Beltrami field is all remainder") {
        const AnalyticField f = abc_field(1, 0.8, 0.6, TimeLaw::beltrami(1.0, 0.5));
        const PolygonalLoop C = wobbly(16, 5);
        const OperatorResult r = advection_op(f, C, 2, 0.3, params(16));
        CHECK(norm(r.part("target")) <= 1e-14);
        CHECK(norm(r.part("r_adv") - r.value) <= 1e-14);
    }

    TEST_CASE("residuals vanish on a constant field") {
        AnalyticField f = constant_field({0.3, -1, 0.7});
        f.law = TimeLaw::linear(0.0);
        const PolygonalLoop C = wobbly(8, 6);
        const OperatorParams p = params(8);
        CHECK(std::abs(loop_equation_residual(f, C, 0, p).r_loop) <= 1e-12);
        CHECK(std::abs(liquid_residual(f, C, 0, p).residual) <= 1e-12);
        CHECK(rbad_probe(f, C, 2, 0, p).r_bad <= 1e-12);
    }

    TEST_CASE("loop residual decreases with N") {
        const AnalyticField f = abc_field(1, 0.8, 0.6, TimeLaw::beltrami(1.0, 0.5));
        const SampledCurve g = circle_curve({0.2, -0.1, 0.3}, 1.0, Vec3{0.2, 0.3, 1} / norm(Vec3{0.2, 0.3, 1}));
        OperatorParams p = params(8, 0.4);
        p.gamma = 1.0;
        const double r8 = std::abs(loop_equation_residual(f, discretize_curve(g, 8).loop, 0.3, p).r_loop);
        p.N = 16;
        const double r16 = std::abs(loop_equation_residual(f, discretize_curve(g, 16).loop, 0.3, p).r_loop);
        CHECK(r16 < r8);
    }

    TEST_CASE("parameter validation") {
        OperatorParams p = params(16);
        p.alpha = 1.2;
        CHECK_THROWS_AS(validate(p), std::invalid_argument);
        CHECK_THROWS(check_extended_index(wobbly(16, 1), 15));
    }
}

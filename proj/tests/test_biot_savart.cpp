#include "doctest.h"
#include "looplab/biot_savart.hpp"
#include "looplab/geometry.hpp"
#include "looplab/rng.hpp"

#include <cmath>

using namespace looplab;

TEST_SUITE("biot_savart") {
    TEST_CASE("cutoff") {
        CHECK(cutoff_chi(0.5) == 1.0);
        CHECK(cutoff_chi(2.5) == 0.0);
        CHECK(cutoff_chi(1.5) == doctest::Approx(0.5).epsilon(1e-15));
    }

    TEST_CASE("zero vorticity gives zero velocity") {
        CHECK(norm(bs_direct([](const Vec3&) { return Vec3{}; }, {0.3, 0.1, -0.2}, BSConfig{})) == 0.0);
    }

    TEST_CASE("constant vorticity vanishes at the centre") {
        BSConfig c;
        c.ell = 0.5;
        CHECK(norm(bs_direct([](const Vec3&) { return Vec3{0.3, -1, 2}; }, {0.3, 0.1, -0.2}, c)) <= 1e-12);
    }

    TEST_CASE("remainder values") {
        CHECK(remainder_R(0.0) == doctest::Approx(-1.0).epsilon(1e-10));
        CHECK(std::abs(remainder_R(1e3)) <= 1e-8);
        CHECK(remainder_R_radial(2.7, 2.0) == doctest::Approx(remainder_R(2.7)).epsilon(1e-10));
    }

    TEST_CASE("closed form against direct quadrature") {
        CounterRng r(21);
        for (int i = 0; i < 10; ++i) {
            Vec3 dir = r.normal_vec();
            dir = dir / norm(dir);
            Vec3 e1, e2;
            plane_basis(dir, e1, e2);
            const WaveMode m = make_wave_mode(CVec3{e1 + 0.3 * e2, 0.5 * e2}, dir, r.uniform(0, 6));
            const Vec3 x = r.uniform_vec(-1, 1);
            BSConfig c;
            c.ell = 0.25;
            const CVec3 d = bs_direct_complex(
                [&](const Vec3& y) { return std::exp(cplx(0.0, dot(m.a, y) + m.phase)) * m.v0; }, x, c);
            const CVec3 w = bs_wave_closed(m, x, c.ell);
            CHECK(norm(d - w) <= 1e-4 * norm(w));
        }
    }

    TEST_CASE("closed form limits") {
        const WaveMode m = make_wave_mode(CVec3{Vec3{1, 0, 0}, Vec3{}}, {0, 0, 1});
        const double ell = 1e-3;
        const CVec3 w = bs_wave_closed(m, {0, 0, 0}, ell);
        // i (a/|a|^2) x v0 = i e3 x e1 = i e2
        CHECK(norm(w - CVec3{Vec3{}, Vec3{0, 1, 0}}) <= 1e-8);
        WaveMode par;
        par.v0 = CVec3{Vec3{0, 0, 1}, Vec3{}};
        par.a = {0, 0, 2};
        CHECK(norm(bs_wave_closed(par, {0.1, 0.2, 0.3}, 0.5)) == 0.0);
    }

    TEST_CASE("recovery rate") {
        WindowedMode m{{1, 0, 0}, {0, 0, 1}, 0.1};
        const RecoveryTable t = recovery_error(m, {1, 0.5, 0.25, 0.125, 0.0625, 0.03125});
        CHECK(t.slope >= 1.4);
        const RecoveryTable rot = recovery_error(rotation_field(), {1, 0.5});
        CHECK(rot.excluded);
        const AnalyticField w = single_mode_field(make_wave_mode(CVec3{Vec3{1, 0, 0}, Vec3{}}, {0, 0, 2}));
        const RecoveryTable pw = recovery_error(w, {1, 0.5, 0.25});
        for (const auto& row : pw.rows) CHECK(row.error == doctest::Approx(std::abs(remainder_R(2.0 / row.ell))).epsilon(1e-12));
    }

    TEST_CASE("polynomial growth bound") {
        const PolygrowthReport r = polygrowth_check(1.0, 0, {0.5, 0.25, 0.125}, BSConfig{}, 20, 11);
        CHECK(r.pass);
    }
}

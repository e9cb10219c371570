#include "doctest.h"
#include "looplab/euler_ensemble.hpp"

#include <cmath>

using namespace looplab;

TEST_SUITE("euler_ensemble") {
    TEST_CASE("{5/2} geometry") {
        const StarPolygonEnsemble e = construct(5, 2);
        CHECK(e.radius == doctest::Approx(0.525731).epsilon(1e-6));
        CHECK(norm(e.A) == doctest::Approx(0.162460).epsilon(1e-5));
        CHECK(e.radius == doctest::Approx(1.0 / (2.0 * std::sin(2.0 * kPi / 5.0))).epsilon(1e-15));
        CHECK(check_conditions(e).max() <= 1e-14);
    }

    TEST_CASE("triangle") {
        const StarPolygonEnsemble e = construct(3, 1);
        CHECK(e.radius == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
        CHECK(norm(e.A) == doctest::Approx(0.5 / std::sqrt(3.0)).epsilon(1e-15));
    }

    TEST_CASE("inadmissible symbols are rejected") {
        CHECK_THROWS_AS(construct(4, 2), std::invalid_argument);
        CHECK_THROWS_AS(construct(5, 3), std::invalid_argument);
        CHECK_THROWS_AS(construct(2, 1), std::invalid_argument);
    }

    TEST_CASE("I_a, I_b, I_c vanish and F.F = 0 with F != 0") {
        for (int q : {3, 5, 7, 11, 25, 101})
            for (int p : star_steps(q)) {
                const StarPolygonEnsemble e = construct(q, p);
                for (int k = 0; k < q; k += std::max(1, q / 7)) {
                    const Iabc I = verify_Iabc(e, k);
                    CHECK(std::max({norm(I.Ia), norm(I.Ib), norm(I.Ic)}) <= 1e-12);
                    CHECK(std::abs(I.FF) <= 1e-12);
                    CHECK(I.Fnorm > 1e-3);
                }
            }
    }

    TEST_CASE("a perturbed ensemble breaks the identities") {
        StarPolygonEnsemble e = construct(7, 2);
        e.f[3] += Vec3{1e-3, 0, 0};
        double worst = 0.0;
        for (int k = 0; k < 7; ++k) {
            const Iabc I = verify_Iabc(e, k);
            worst = std::max({worst, norm(I.Ia), norm(I.Ib), norm(I.Ic)});
        }
        CHECK(worst > 1e-4);
    }

    TEST_CASE("trajectory residuals") {
        const EnsembleTrajectory tr{construct(5, 2), 1.0, 1.0};
        for (SystemVariant v : {SystemVariant::Extended, SystemVariant::Liquid}) {
            const EnsembleResiduals r = trajectory_residuals(tr, v, {0, 0.5, 1, 2});
            CHECK(r.max_residual <= 1e-10);
            CHECK(r.max_imag_increment <= 1e-15);
        }
        CHECK_THROWS_AS(trajectory_residuals(tr, SystemVariant::Drift, {0}), std::invalid_argument);
        CHECK_THROWS_AS(trajectory_residuals(tr, SystemVariant::Liquid, {-1.5}), std::invalid_argument);
    }

    TEST_CASE("time translation") {
        const StarPolygonEnsemble e = construct(7, 3);
        const EnsembleTrajectory a{e, 1.0, 1.0}, b{e, 1.5, 1.0};
        const EnsembleResiduals ra = trajectory_residuals(a, SystemVariant::Extended, {0.5});
        const EnsembleResiduals rb = trajectory_residuals(b, SystemVariant::Extended, {0.0});
        REQUIRE(ra.rows.size() == rb.rows.size());
        for (std::size_t i = 0; i < ra.rows.size(); ++i) CHECK(ra.rows[i].residual == rb.rows[i].residual);
    }

    TEST_CASE("exact rate matches differences of the state") {
        const EnsembleTrajectory tr{construct(11, 4), 1.0, 1.0};
        const double t = 0.7, h = 1e-4;
        const MomentumState r = tr.rate(t), a = tr.state(t + h), b = tr.state(t - h);
        for (int k = 0; k < 11; ++k) CHECK(norm((a.P[k] - b.P[k]) / (2 * h) - r.P[k]) <= 1e-7);
    }
}

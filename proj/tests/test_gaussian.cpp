#include "doctest.h"
#include "looplab/gaussian_mc.hpp"
#include "looplab/parallel.hpp"
#include "looplab/rng.hpp"

#include <cmath>

using namespace looplab;

namespace {
GaussianSpec spec() {
    GaussianSpec s;
    s.r0 = 1.0;
    s.diameter = 2.0;
    return s;
}
}  // namespace

TEST_SUITE("gaussian_mc") {
    TEST_CASE("samples are reproducible across thread counts") {
        const SpectralLattice L = build_lattice(spec());
        set_thread_count(1);
        const FieldSample a = sample_field(L, 5, 3);
        const McEstimate m1 = psi0_mc(discretize_curve(circle_curve({0, 0, 0}, 1), 32).loop, spec(), 1, 1, 200, 9);
        set_thread_count(4);
        const FieldSample b = sample_field(L, 5, 3);
        const McEstimate m4 = psi0_mc(discretize_curve(circle_curve({0, 0, 0}, 1), 32).loop, spec(), 1, 1, 200, 9);
        set_thread_count(1);
        REQUIRE(a.c.size() == b.c.size());
        for (std::size_t i = 0; i < a.c.size(); ++i) CHECK(a.c[i] == b.c[i]);
        CHECK(m1.mean == m4.mean);
    }

    TEST_CASE("samples are divergence free") {
        const FieldSample f = sample_field(spec(), 1);
        CounterRng r(2);
        for (int i = 0; i < 100; ++i) CHECK(std::abs(f.divergence(r.uniform_vec(-2, 2))) <= 1e-10);
    }

    TEST_CASE("pointwise variance") {
        const GaussianSpec s = spec();
        const SpectralLattice L = build_lattice(s);
        double theory = 0.0;
        // one component of 2 Re(c e^{ikx}) summed over independent modes
        for (std::size_t j = 0; j < L.k.size(); ++j) {
            const double s2 = L.sigma[j] * L.sigma[j];
            theory += 2.0 * s2 * (L.e1[j][0] * L.e1[j][0] + L.e2[j][0] * L.e2[j][0]);
        }
        const int M = 10000;
        double acc = 0.0;
        for (int m = 0; m < M; ++m) {
            const double v = sample_field(L, 77, m).velocity({0.1, 0.2, 0.3})[0];
            acc += v * v;
        }
        CHECK(acc / M == doctest::Approx(theory).epsilon(0.05));
    }

    TEST_CASE("heat pairing decreases with r0") {
        const CurlGaussian f{{1, 0.2, 0}, {0, 0, 0}, 0.5};
        const double a = heat_pairing(f, f, 0.5), b = heat_pairing(f, f, 1.0), c = heat_pairing(f, f, 2.0);
        CHECK(a > b);
        CHECK(b > c);
        CHECK(c > 0);
    }

    TEST_CASE("covariance of an orthogonal and a diagonal pair") {
        const CurlGaussian f{{1, 0, 0}, {0, 0, 0}, 0.5};
        const CurlGaussian g{{0, 0, 1}, {0.3, 0, 0}, 0.5};
        const CovarianceReport r = covariance_check(spec(), {{f, f}, {f, g}}, 2000, 13);
        for (const auto& row : r.rows) CHECK(std::abs(row.z) <= 3.0);
    }

    TEST_CASE("closed form limits") {
        const PolygonalLoop point({{0.2, 0.2, 0.2}, {0.2, 0.2, 0.2}, {0.2, 0.2, 0.2}});
        CHECK(psi0_closed(point, 1.0, 1.0, 1.0, ExponentVariant::Squared) == 1.0);
        const PolygonalLoop C = discretize_curve(circle_curve({0, 0, 0}, 1), 32).loop;
        CHECK(psi0_closed(C, 1.0, 1e-9, 1.0, ExponentVariant::Linear) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(psi0_closed(C, 1.0, 1.0, 1.0, ExponentVariant::Linear) ==
              doctest::Approx(psi0_closed(C, 1.0, 1.0, 1.0, ExponentVariant::Squared)));
    }

    TEST_CASE("translation invariance with paired seeds") {
        const PolygonalLoop C = discretize_curve(circle_curve({0, 0, 0}, 0.8), 32).loop;
        const McEstimate a = psi0_mc(C, spec(), 2, 1, 2000, 31);
        const McEstimate b = psi0_mc(C.translated({0.2, -0.1, 0.05}), spec(), 2, 1, 2000, 31);
        const double se = std::hypot(a.stderr_re, b.stderr_re);
        CHECK(std::abs(a.mean.real() - b.mean.real()) <= 3 * se);
    }

    TEST_CASE("mean decays with gamma/nu") {
        const PolygonalLoop C = discretize_curve(circle_curve({0, 0, 0}, 1), 32).loop;
        const double a = std::abs(psi0_mc(C, spec(), 1, 1, 1000, 5).mean);
        const double b = std::abs(psi0_mc(C, spec(), 2, 1, 1000, 5).mean);
        const double c = std::abs(psi0_mc(C, spec(), 4, 1, 1000, 5).mean);
        CHECK(a > b);
        CHECK(b > c);
    }

    TEST_CASE("spec validation") {
        GaussianSpec s = spec();
        s.r0 = -1;
        CHECK_THROWS_AS(validate(s), std::invalid_argument);
    }
}

#include "doctest.h"
#include "looplab/fd.hpp"
#include "looplab/momentum.hpp"
#include "looplab/rng.hpp"

#include <cmath>

using namespace looplab;

namespace {
const Vec3 e1{1, 0, 0}, e2{0, 1, 0}, e3{0, 0, 1};

// P_0 = 0 and dP_k = d[k] for k < N-1; the last increment closes the loop.
MomentumState from_increments(const std::vector<Vec3>& d) {
    MomentumState s;
    s.P.assign(d.size(), CVec3{});
    for (std::size_t k = 1; k < d.size(); ++k) s.P[k] = s.P[k - 1] + CVec3{d[k - 1]};
    return s;
}

PolygonalLoop some_loop(int N) {
    std::vector<Vec3> v;
    for (int k = 0; k < N; ++k) {
        const double th = 2 * kPi * k / N;
        v.push_back({std::cos(th), std::sin(th) + 0.1 * std::cos(3 * th), 0.2 * std::sin(2 * th)});
    }
    return PolygonalLoop(v);
}

OperatorParams unit(int N) {
    OperatorParams p;
    p.gamma = 1;
    p.nu = 1;
    p.N = N;
    return p;
}

// Levi-Civita contraction, written independently of cross()
Vec3 eps_cross(const Vec3& a, const Vec3& b) {
    Vec3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                const int e = (i - j) * (j - k) * (k - i) / 2;
                r[i] += e * a[j] * b[k];
            }
    return r;
}
}  // namespace

TEST_SUITE("momentum") {
    TEST_CASE("psi in momentum mode") {
        const PolygonalLoop C = some_loop(8);
        MomentumState z;
        z.P.assign(8, CVec3{});
        CHECK(std::abs(psi_momentum(z, C, 1, 1).increments - cplx(1, 0)) == 0.0);
        MomentumState s = from_increments({e1, e2, e3, e1, e2, e3, e1, e2});
        CHECK(std::abs(psi_momentum(s, C, 1.5, 0.5).increments) == doctest::Approx(1.0).epsilon(1e-14));
        for (auto& P : s.P) P.im = Vec3{0.3, -0.2, 0.5};
        CHECK(std::abs(psi_momentum(s, C, 1.5, 0.5).increments) == doctest::Approx(1.0).epsilon(1e-14));
    }

    TEST_CASE("closed symbols") {
        // k = 2: dP_2 = e1, dP_1 = e2
        const MomentumState s = from_increments({e3, e2, e1, e3, e3, e3, e3, e3});
        const ClosedActions a = closed_operator_actions(s, 2, unit(8));
        CHECK(norm(a.vorticity - CVec3{Vec3{}, -1.0 * e3}) <= 1e-15);
        const MomentumState par = from_increments({e3, e1, e1, e3, e3, e3, e3, e3});
        CHECK(norm(closed_operator_actions(par, 2, unit(8)).diffusion) == 0.0);
    }

    TEST_CASE("vorticity symbol against vertex differences") {
        CounterRng r(4);
        std::vector<Vec3> d;
        for (int k = 0; k < 10; ++k) d.push_back(r.uniform_vec(-1, 1));
        const MomentumState s = from_increments(d);
        const PolygonalLoop C = some_loop(10);
        OperatorParams p = unit(10);
        p.gamma = 1.3;
        for (int k = 0; k < 10; ++k) {
            cplx H[3][3];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    H[a][b] = mixed_derivative<cplx>(
                        [&](double x, double y) {
                            PolygonalLoop P = C;
                            P.vertex_mut(k + 1)[a] += x;
                            P.vertex_mut(k)[b] += y;
                            return psi_momentum(s, P, p.gamma, p.nu).vertices;
                        },
                        1e-3, 3);
            CVec3 c;
            c.set(0, H[1][2] - H[2][1]);
            c.set(1, H[2][0] - H[0][2]);
            c.set(2, H[0][1] - H[1][0]);
            c = (cplx(0, p.nu / p.gamma) / psi_momentum(s, C, p.gamma, p.nu).vertices) * c;
            CHECK(norm(c - closed_operator_actions(s, k, p).vorticity) <= 1e-7);
        }
    }

    TEST_CASE("drift term") {
        CHECK(norm(e_k(from_increments(std::vector<Vec3>(8, e1)), 2, unit(8))) == 0.0);
        // dP_{k-1} = e1, dP_k = e2, dP_{k+2} = e1, dP_{k+3} = e2 at k = 2
        const MomentumState s = from_increments({e3, e1, e2, e3, e1, e2, e3, e3});
        const OperatorParams p = unit(8);
        const CVec3 e = e_k(s, 2, p);
        const Vec3 expect_im = eps_cross(eps_cross(e2, e1), e2) / std::log(8.0);
        CHECK(norm(e.im - expect_im) <= 1e-15);
        CHECK(norm(e.re - 2.0 * e2) <= 1e-15);
        CHECK(norm(e - e_k_composed(s, 2, p)) <= 1e-10);
    }

    TEST_CASE("liquid drift") {
        MomentumState s = from_increments({e1, e2, e3, e1, e2, e3, e1, e2});
        // P_k = -P_{k-1}: zero midpoint
        s.P[3] = -1.0 * s.P[2];
        CHECK(norm(liquid_e_k(s, 3, 1.0, 1.0)) == 0.0);
        CounterRng r(9);
        MomentumState t;
        for (int k = 0; k < 8; ++k) t.P.push_back(CVec3{r.uniform_vec(-1, 1), Vec3{0.1, 0.2, 0.3}});
        for (int k = 0; k < 8; ++k) {
            const CVec3 diff = extended_e_k(t, k, 1.7, 1.0, 8) - liquid_e_k(t, k, 1.7, 1.0);
            CHECK(norm(diff - extended_e_k_linear(t, k, 1.7, 8)) <= 1e-14);
        }
    }

    TEST_CASE("state validation") {
        MomentumState s = from_increments({e1, e2, e3, e1, e2, e3, e1, e2});
        CHECK_NOTHROW(validate(s));
        s.P[0] = CVec3{e2};
        CHECK_THROWS_AS(validate(s), std::invalid_argument);
        MomentumLimits lim;
        lim.require_p0_zero = false;
        CHECK_NOTHROW(validate(s, lim));
        s.P[2].im = Vec3{0, 0, 1};
        CHECK_THROWS_AS(validate(s, lim), std::invalid_argument);
    }

    TEST_CASE("static equal increments solve the system") {
        const MomentumState s = from_increments(std::vector<Vec3>(8, e1));
        MomentumTrajectory tr;
        tr.t = {0, 0.1, 0.2, 0.3, 0.4};
        tr.states.assign(5, s);
        const SystemResidual r = system_residual(tr, SystemVariant::Drift, unit(8));
        CHECK(!r.rows.empty());
        CHECK(r.max_residual <= 1e-14);
    }

    TEST_CASE("variant names") {
        CHECK(parse_system_variant("extended") == SystemVariant::Extended);
        CHECK(to_string(SystemVariant::Liquid) == "liquid");
        CHECK_THROWS(parse_system_variant("nope"));
    }
}

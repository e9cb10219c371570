#include "looplab/circulation.hpp"

#include "looplab/quadrature.hpp"

#include <stdexcept>

namespace looplab {

void validate(const QuadratureConfig& q) {
    if (q.nodes_per_segment < 2 || q.nodes_a < 2) throw std::invalid_argument("quadrature: node counts must be >= 2");
    if (!(q.fd_step > 0.0) || !(q.fd_step_mixed > 0.0)) throw std::invalid_argument("quadrature: fd steps must be > 0");
    if (q.richardson_levels < 0 || q.richardson_levels > 6)
        throw std::invalid_argument("quadrature: richardson_levels must be in 0..6");
}

SegmentMoments segment_moments_gauss(const AnalyticField& f, const Vec3& A, const Vec3& B, double t, int nodes) {
    const GaussRule& r = gauss01(nodes);
    const Vec3 d = B - A;
    SegmentMoments m;
    for (int i = 0; i < r.size(); ++i) {
        const FieldJet j = eval_jet(f, A + r.x[i] * d, t);
        m.u0 += r.w[i] * j.u;
        m.g0 += r.w[i] * j.grad;
        m.g1 += (r.w[i] * r.x[i]) * j.grad;
    }
    return m;
}

namespace {

// E0 = int_0^1 e^{i b s} ds, E1 = int_0^1 s e^{i b s} ds
void exp_moments(double b, cplx& E0, cplx& E1) {
    const cplx ib(0.0, b);
    if (std::fabs(b) < 0.25) {
        cplx term = 1.0;
        E0 = 0.0;
        E1 = 0.0;
        for (int m = 0; m < 24; ++m) {
            E0 += term / static_cast<double>(m + 1);
            E1 += term / static_cast<double>(m + 2);
            term *= ib / static_cast<double>(m + 1);
        }
        return;
    }
    const cplx e = std::exp(ib);
    E0 = (e - 1.0) / ib;
    E1 = (e - E0) / ib;
}

}  // namespace

SegmentMoments segment_moments_exact(const AnalyticField& f, const Vec3& A, const Vec3& B, double t) {
    const Vec3 d = B - A;
    SegmentMoments m;
    m.u0 = f.c0;
    if (f.has_linear) {
        m.u0 += f.L * (A + 0.5 * d);
        m.g0 = transpose(f.L);
        m.g1 = 0.5 * m.g0;
    }
    for (const auto& w : f.modes) {
        const double th0 = dot(w.a, A) + w.phase;
        cplx E0, E1;
        exp_moments(dot(w.a, d), E0, E1);
        const cplx e0 = std::exp(cplx(0.0, th0));
        const CVec3 z0 = (e0 * E0) * w.v0;
        const CVec3 z1 = (e0 * E1) * w.v0;
        m.u0 += z0.re;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) {
                m.g0(i, k) -= w.a[i] * z0.im[k];
                m.g1(i, k) -= w.a[i] * z1.im[k];
            }
    }
    const double s = f.law.factor(t);
    m.u0 *= s;
    m.g0 *= s;
    m.g1 *= s;
    return m;
}

double circulation(const AnalyticField& f, const PolygonalLoop& C, double t, const QuadratureConfig& q) {
    return loop_line_integral(C, q.nodes_per_segment, [&](const Vec3& x) { return eval_velocity(f, x, t); });
}

LoopFunctionalValue loop_functional_sample(const AnalyticField& f, const PolygonalLoop& C, double t, double gamma,
                                           double nu, const QuadratureConfig& q) {
    if (!(nu > 0.0)) throw std::invalid_argument("loop functional: nu must be > 0");
    LoopFunctionalValue v;
    v.gamma_circ = circulation(f, C, t, q);
    v.value = std::exp(cplx(0.0, gamma / nu * v.gamma_circ));
    return v;
}

Vec3 gamma_gradient(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                    const QuadratureConfig& q) {
    const Vec3 Cm = C.vertex(k - 1), C0 = C.vertex(k), Cp = C.vertex(k + 1);
    const SegmentMoments before = segment_moments_gauss(f, Cm, C0, t, q.nodes_per_segment);
    const SegmentMoments after = segment_moments_gauss(f, C0, Cp, t, q.nodes_per_segment);
    return segment_grad_B(before, C0 - Cm) + segment_grad_A(after, Cp - C0);
}

Vec3 segment_average(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                     const QuadratureConfig& q) {
    const Vec3 Ck = C.vertex(k);
    const Vec3 mid = 0.5 * (C.vertex(k - 1) + C.vertex(k + 1));
    const GaussRule& r = gauss01(q.nodes_a);
    Vec3 s;
    for (int i = 0; i < r.size(); ++i) {
        const double a = r.x[i];
        s += r.w[i] * eval_vorticity(f, a * Ck + (1.0 - a) * mid, t);
    }
    return s;
}

AreaDerivative area_derivative_exact(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                                     const QuadratureConfig& q) {
    // Only the segment [C_k, C_{k+1}] couples the two vertices. The mixed Hessian of
    // its integral is int (1-s)s D^2u.d + (1-s) d_j u_p - s d_p u_j; the first part is
    // symmetric and the other two contract with epsilon to -w.
    const SegmentMoments m = segment_moments_gauss(f, C.vertex(k), C.vertex(k + 1), t, q.nodes_per_segment);
    AreaDerivative r;
    r.value = -m.w0();
    const Vec3 avg = segment_average(f, C, k, t, q);
    r.leading = -avg;
    r.r_ad = r.value + avg;
    return r;
}

cplx dt_loop_functional(const AnalyticField& f, const PolygonalLoop& C, double t, double gamma, double nu,
                        const QuadratureConfig& q) {
    if (f.law.is_static()) throw std::invalid_argument("dt_loop_functional: field has no time law");
    const LoopFunctionalValue psi = loop_functional_sample(f, C, t, gamma, nu, q);
    const double integral = loop_line_integral(C, q.nodes_per_segment, [&](const Vec3& x) {
        const FieldJet j = eval_jet(f, x, t);
        return cross(j.u, curl_of(j.grad)) - nu * eval_curl_vorticity(f, x, t);
    });
    return cplx(0.0, gamma / nu) * psi.value * integral;
}

}  // namespace looplab

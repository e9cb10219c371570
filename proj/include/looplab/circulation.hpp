#pragma once

#include "looplab/fields.hpp"
#include "looplab/geometry.hpp"

namespace looplab {

struct QuadratureConfig {
    int nodes_per_segment = 16;
    int nodes_a = 32;
    double fd_step = 1e-4;        // first derivatives of the circulation
    double fd_step_mixed = 1e-3;  // nested second derivatives of the loop functional
    int richardson_levels = 2;
};

void validate(const QuadratureConfig& q);

// Integrals over the segment x(s) = A + s (B - A), s in [0,1].
struct SegmentMoments {
    Vec3 u0;    // int u
    Mat3 g0;    // int grad u
    Mat3 g1;    // int s grad u
    Vec3 w0() const { return curl_of(g0); }  // int vorticity
};

SegmentMoments segment_moments_gauss(const AnalyticField& f, const Vec3& A, const Vec3& B, double t, int nodes);
// Closed-form moments, valid for any mode sum with linear and constant parts.
SegmentMoments segment_moments_exact(const AnalyticField& f, const Vec3& A, const Vec3& B, double t);

// Gradients of the segment integral int u(A + s d).d ds with respect to its endpoints.
inline Vec3 segment_grad_B(const SegmentMoments& m, const Vec3& d) { return m.g1 * d + m.u0; }
inline Vec3 segment_grad_A(const SegmentMoments& m, const Vec3& d) { return (m.g0 - m.g1) * d - m.u0; }

double circulation(const AnalyticField& f, const PolygonalLoop& C, double t, const QuadratureConfig& q = {});

struct LoopFunctionalValue {
    enum class Mode { Physical, Momentum };
    cplx value;
    double gamma_circ = 0.0;  // the circulation
    Mode mode = Mode::Physical;
};

LoopFunctionalValue loop_functional_sample(const AnalyticField& f, const PolygonalLoop& C, double t, double gamma,
                                           double nu, const QuadratureConfig& q = {});

Vec3 gamma_gradient(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                    const QuadratureConfig& q = {});

// Average of w on the median segment from C_k to (C_{k-1}+C_{k+1})/2.
Vec3 segment_average(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                     const QuadratureConfig& q = {});

struct AreaDerivative {
    Vec3 value;    // grad_{C_{k+1}} x grad_{C_k} Gamma
    Vec3 leading;  // -<w>_k
    Vec3 r_ad;     // value + <w>_k
};
AreaDerivative area_derivative_exact(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                                     const QuadratureConfig& q = {});

// d/dt of the loop functional for an exact Navier-Stokes solution, from the
// vorticity form of the momentum equation: (i gamma/nu) Psi oint (u x w - nu curl w).dC
cplx dt_loop_functional(const AnalyticField& f, const PolygonalLoop& C, double t, double gamma, double nu,
                        const QuadratureConfig& q = {});

// oint g(x).dC by Gauss-Legendre per segment, for an arbitrary vector integrand.
template <class G>
double loop_line_integral(const PolygonalLoop& C, int nodes, G&& g);

}  // namespace looplab

#include "looplab/quadrature.hpp"

namespace looplab {
template <class G>
double loop_line_integral(const PolygonalLoop& C, int nodes, G&& g) {
    const GaussRule& r = gauss01(nodes);
    double total = 0.0;
    for (int k = 0; k < C.size(); ++k) {
        const Vec3 A = C.vertex(k);
        const Vec3 d = edge(C, k);
        double s = 0.0;
        for (int i = 0; i < r.size(); ++i) s += r.w[i] * dot(g(A + r.x[i] * d), d);
        total += s;
    }
    return total;
}
}  // namespace looplab

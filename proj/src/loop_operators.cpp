#include "looplab/loop_operators.hpp"

#include "looplab/fd.hpp"
#include "looplab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace looplab {

double OperatorParams::ell() const { return std::pow(static_cast<double>(N), -alpha); }
double OperatorParams::log_inv_rho() const { return std::log(static_cast<double>(N)); }

BSConfig OperatorParams::ball_config() const {
    BSConfig c = ball;
    c.ell = ell();
    return c;
}

void validate(const OperatorParams& p) {
    if (!(p.gamma > 0.0) || !(p.nu > 0.0)) throw std::invalid_argument("operator params: gamma and nu must be > 0");
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw std::invalid_argument("operator params: alpha must be in (0,1)");
    if (p.N < 8) throw std::invalid_argument("operator params: N must be >= 8");
    validate(p.ball_config());
}

const CVec3& OperatorResult::part(const std::string& name) const {
    for (const auto& [n, v] : decomposition)
        if (n == name) return v;
    throw std::out_of_range("operator result has no component " + name);
}

VertexDirection single_vertex(long long k) { return {{{k, 1.0}}}; }

VertexDirection extended_direction(int N, long long k) {
    VertexDirection d;
    d.terms.push_back({k, 0.5});
    for (long long j = k + 1; j <= N - 1; ++j) d.terms.push_back({j, 1.0});
    return d;
}

void check_extended_index(const PolygonalLoop& C, long long k) {
    if (k < 1 || k > C.size() - 2) throw std::invalid_argument("extended operator: k must be in [1, N-2]");
}

namespace {

const cplx I(0.0, 1.0);

CVec3 times_i(const CVec3& v) { return {-v.im, v.re}; }
CVec3 cross_rc(const Vec3& a, const CVec3& b) { return {cross(a, b.re), cross(a, b.im)}; }

// Vertex gradients of Gamma and the edge integral of w around vertex k, from the
// closed-form moments of segments k-1, k, k+1.
struct Local {
    SegmentMoments prev, cur, next;
    Vec3 g0, g1, w;
};

Local local_at(const AnalyticField& f, const Vec3& Cm, const Vec3& C0, const Vec3& Cp, const Vec3& Cpp, double t) {
    Local L;
    L.prev = segment_moments_exact(f, Cm, C0, t);
    L.cur = segment_moments_exact(f, C0, Cp, t);
    L.next = segment_moments_exact(f, Cp, Cpp, t);
    L.g0 = segment_grad_B(L.prev, C0 - Cm) + segment_grad_A(L.cur, Cp - C0);
    L.g1 = segment_grad_B(L.cur, Cp - C0) + segment_grad_A(L.next, Cpp - Cp);
    L.w = L.cur.w0();
    return L;
}

Local local_at(const AnalyticField& f, const PolygonalLoop& C, long long k, double t) {
    return local_at(f, C.vertex(k - 1), C.vertex(k), C.vertex(k + 1), C.vertex(k + 2), t);
}

Vec3 vertex_gradient(const AnalyticField& f, const PolygonalLoop& C, long long k, double t) {
    const Vec3 Cm = C.vertex(k - 1), C0 = C.vertex(k), Cp = C.vertex(k + 1);
    return segment_grad_B(segment_moments_exact(f, Cm, C0, t), C0 - Cm) +
           segment_grad_A(segment_moments_exact(f, C0, Cp, t), Cp - C0);
}

// sum_{j=from}^{to} grad_{C_j} Gamma
Vec3 gradient_sum(const AnalyticField& f, const PolygonalLoop& C, long long from, long long to, double t) {
    Vec3 s;
    for (long long j = from; j <= to; ++j) s += vertex_gradient(f, C, j, t);
    return s;
}

// w - i kappa X for X = a x g0
CVec3 symbol(const Vec3& w, const Vec3& a, const Vec3& g0, double kappa) { return {w, -kappa * cross(a, g0)}; }

// Derivatives with respect to C_k of g_{k+1} (J1) and of g_k (J0): J(p,j) = d g_p / d C_{k,j}.
struct SecondDerivatives {
    Mat3 J1, J0;
    Vec3 curl_w;  // curl_{C_k} of the edge integral of w
};

SecondDerivatives second_derivatives(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                                     int nodes) {
    const GaussRule& r = gauss01(nodes);
    SecondDerivatives D;
    const Vec3 Cm = C.vertex(k - 1), C0 = C.vertex(k), Cp = C.vertex(k + 1);
    const Vec3 dprev = C0 - Cm, dcur = Cp - C0;
    for (int i = 0; i < r.size(); ++i) {
        const double s = r.x[i], w = r.w[i];
        {
            const Vec3 x = C0 + s * dcur;
            const FieldJet j = eval_jet(f, x, t);
            const Mat3 Hd = contract_last(eval_hessian_velocity(f, x, t), dcur);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    const double sym = j.grad(a, b) + j.grad(b, a);
                    D.J1(a, b) += w * (s * (1 - s) * Hd(a, b) + (1 - s) * j.grad(b, a) - s * j.grad(a, b));
                    D.J0(a, b) += w * ((1 - s) * (1 - s) * Hd(a, b) - (1 - s) * sym);
                }
            D.curl_w += (w * (1 - s)) * eval_curl_vorticity(f, x, t);
        }
        {
            const Vec3 x = Cm + s * dprev;
            const FieldJet j = eval_jet(f, x, t);
            const Mat3 Hd = contract_last(eval_hessian_velocity(f, x, t), dprev);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    D.J0(a, b) += w * (s * s * Hd(a, b) + s * (j.grad(a, b) + j.grad(b, a)));
        }
    }
    return D;
}

// curl_{C_k} of X = a x g0 where d a / d C_k = Ja and d g0 / d C_k = J0.
Vec3 curl_of_cross(const Vec3& a, const Mat3& Ja, const Vec3& g0, const Mat3& J0) {
    // dX(m, j) = d X_m / d C_{k,j}
    Mat3 dX;
    for (int j = 0; j < 3; ++j) {
        const Vec3 da{Ja(0, j), Ja(1, j), Ja(2, j)};
        const Vec3 dg{J0(0, j), J0(1, j), J0(2, j)};
        const Vec3 col = cross(da, g0) + cross(a, dg);
        dX(0, j) = col.x;
        dX(1, j) = col.y;
        dX(2, j) = col.z;
    }
    // (curl X)_i = eps_{ijm} d_j X_m; curl_of expects (j, m) = d_j X_m
    return curl_of(transpose(dX));
}

// 2 [curl w - i kappa curl X + i kappa g0 x S] for S = w - i kappa X
CVec3 diffusion_symbol(const SecondDerivatives& D, const Vec3& a, const Mat3& Ja, const Vec3& g0, const CVec3& S,
                       double kappa) {
    const Vec3 cx = curl_of_cross(a, Ja, g0, D.J0);
    CVec3 r{D.curl_w, -kappa * cx};
    r += kappa * times_i(cross_rc(g0, S));
    return 2.0 * r;
}

cplx psi_of(const AnalyticField& f, const PolygonalLoop& C, double t, const OperatorParams& p,
            const QuadratureConfig& q) {
    return loop_functional_sample(f, C, t, p.gamma, p.nu, q).value;
}

OperatorResult finish(const CVec3& value, cplx psi) {
    OperatorResult r;
    r.value = value;
    r.psi = psi;
    r.raw = psi * value;
    return r;
}

PolygonalLoop perturbed(const PolygonalLoop& C, const VertexDirection& d, const Vec3& v) {
    PolygonalLoop P = C;
    for (const auto& [j, w] : d.terms) P.vertex_mut(j) += w * v;
    return P;
}

const Vec3 kE[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

// (i nu / gamma)(Da x Db) psi by mixed central differences of psi
CVec3 curl_pair_fd(const AnalyticField& f, const PolygonalLoop& C, double t, const OperatorParams& p,
                   const QuadratureConfig& q, const VertexDirection& Da, const VertexDirection& Db) {
    cplx H[3][3];
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            H[a][b] = mixed_derivative<cplx>(
                [&](double s1, double s2) {
                    return psi_of(f, perturbed(perturbed(C, Da, s1 * kE[a]), Db, s2 * kE[b]), t, p, q);
                },
                q.fd_step_mixed, q.richardson_levels);
        }
    CVec3 r;
    r.set(0, H[1][2] - H[2][1]);
    r.set(1, H[2][0] - H[0][2]);
    r.set(2, H[0][1] - H[1][0]);
    return (I * (p.nu / p.gamma)) * r;
}

}  // namespace

OperatorResult vorticity_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                            const OperatorParams& p, const QuadratureConfig& q) {
    const double kappa = p.gamma / p.nu;
    const Local L = local_at(f, C, k, t);
    OperatorResult r = finish(symbol(L.w, L.g1, L.g0, kappa), psi_of(f, C, t, p, q));
    const Vec3 avg = segment_average(f, C, k, t, q);
    r.decomposition = {{"omega_avg", CVec3{avg}},
                       {"minus_r_ad", CVec3{L.w - avg}},
                       {"cross", CVec3{Vec3{}, -kappa * cross(L.g1, L.g0)}}};
    return r;
}

OperatorResult diffusion_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                            const OperatorParams& p, const QuadratureConfig& q) {
    const double kappa = p.gamma / p.nu;
    const Local L = local_at(f, C, k, t);
    const SecondDerivatives D = second_derivatives(f, C, k, t, q.nodes_per_segment);
    const CVec3 S = symbol(L.w, L.g1, L.g0, kappa);
    OperatorResult r = finish(diffusion_symbol(D, L.g1, D.J1, L.g0, S, kappa), psi_of(f, C, t, p, q));
    const Vec3 lead = eval_curl_vorticity(f, C.vertex(k), t);
    r.decomposition = {{"leading", CVec3{lead}}, {"r_diff", r.value - CVec3{lead}}};
    return r;
}

OperatorResult extended_vorticity_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                                   const OperatorParams& p, const QuadratureConfig& q) {
    check_extended_index(C, k);
    const double kappa = p.gamma / p.nu;
    const Local L = local_at(f, C, k, t);
    const Vec3 G = L.g1 + gradient_sum(f, C, k + 2, C.size() - 1, t);
    OperatorResult r = finish(symbol(L.w, G, L.g0, kappa), psi_of(f, C, t, p, q));
    const Vec3 avg = segment_average(f, C, k, t, q);
    r.decomposition = {{"omega_avg", CVec3{avg}},
                       {"minus_r_ad", CVec3{L.w - avg}},
                       {"cross", CVec3{Vec3{}, -kappa * cross(G, L.g0)}},
                       {"cross_extra", CVec3{Vec3{}, -kappa * cross(G - L.g1, L.g0)}}};
    return r;
}

OperatorResult extended_diffusion_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                                   const OperatorParams& p, const QuadratureConfig& q) {
    check_extended_index(C, k);
    const double kappa = p.gamma / p.nu;
    const Local L = local_at(f, C, k, t);
    const Vec3 G = L.g1 + gradient_sum(f, C, k + 2, C.size() - 1, t);
    const SecondDerivatives D = second_derivatives(f, C, k, t, q.nodes_per_segment);
    const CVec3 S = symbol(L.w, G, L.g0, kappa);
    // only g_{k+1} inside G depends on C_k
    OperatorResult r = finish(diffusion_symbol(D, G, D.J1, L.g0, S, kappa), psi_of(f, C, t, p, q));
    const Vec3 lead = eval_curl_vorticity(f, C.vertex(k), t);
    r.decomposition = {{"leading", CVec3{lead}}, {"r_diff", r.value - CVec3{lead}}};
    return r;
}

CVec3 vorticity_fd(const AnalyticField& f, const PolygonalLoop& C, long long k, double t, const OperatorParams& p,
                   const QuadratureConfig& q) {
    const cplx psi = psi_of(f, C, t, p, q);
    return (1.0 / psi) * curl_pair_fd(f, C, t, p, q, single_vertex(k + 1), single_vertex(k));
}

CVec3 extended_vorticity_fd(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                          const OperatorParams& p, const QuadratureConfig& q) {
    check_extended_index(C, k);
    const cplx psi = psi_of(f, C, t, p, q);
    return (1.0 / psi) * curl_pair_fd(f, C, t, p, q, extended_direction(C.size(), k), single_vertex(k));
}

namespace {

CVec3 outer_curl_fd(const PolygonalLoop& C, long long k, const QuadratureConfig& q,
                    const std::function<CVec3(const PolygonalLoop&)>& raw) {
    // d_j raw_m along C_k
    CVec3 d[3];
    for (int j = 0; j < 3; ++j)
        d[j] = central_derivative<CVec3>(
            [&](double s) {
                PolygonalLoop P = C;
                P.vertex_mut(k) += s * kE[j];
                return raw(P);
            },
            q.fd_step, q.richardson_levels);
    CVec3 r;
    r.set(0, d[1][2] - d[2][1]);
    r.set(1, d[2][0] - d[0][2]);
    r.set(2, d[0][1] - d[1][0]);
    return 2.0 * r;
}

}  // namespace

CVec3 diffusion_fd(const AnalyticField& f, const PolygonalLoop& C, long long k, double t, const OperatorParams& p,
                   const QuadratureConfig& q) {
    const cplx psi = psi_of(f, C, t, p, q);
    return (1.0 / psi) *
           outer_curl_fd(C, k, q, [&](const PolygonalLoop& P) { return vorticity_op(f, P, k, t, p, q).raw; });
}

CVec3 extended_diffusion_fd(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                          const OperatorParams& p, const QuadratureConfig& q) {
    check_extended_index(C, k);
    const cplx psi = psi_of(f, C, t, p, q);
    return (1.0 / psi) * outer_curl_fd(C, k, q, [&](const PolygonalLoop& P) {
               return extended_vorticity_op(f, P, k, t, p, q).raw;
           });
}

namespace {

struct BallSetup {
    Vec3 Cm, C0, Cp, Cpp, mid;
    double base_prev = 0.0, base_cur = 0.0;  // segment integrals at the true C_k
    double kappa = 0.0;
};

BallSetup ball_setup(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                     const OperatorParams& p) {
    BallSetup b;
    b.Cm = C.vertex(k - 1);
    b.C0 = C.vertex(k);
    b.Cp = C.vertex(k + 1);
    b.Cpp = C.vertex(k + 2);
    b.mid = 0.5 * (b.Cm + b.Cp);
    b.base_prev = dot(segment_moments_exact(f, b.Cm, b.C0, t).u0, b.C0 - b.Cm);
    b.base_cur = dot(segment_moments_exact(f, b.C0, b.Cp, t).u0, b.Cp - b.C0);
    b.kappa = p.gamma / p.nu;
    return b;
}

// Phase Psi(C_k = y) / Psi(C), local quantities at y.
struct AtY {
    cplx phase;
    Local L;
};

AtY at_y(const AnalyticField& f, const BallSetup& b, const Vec3& y, double t) {
    AtY a;
    a.L = local_at(f, b.Cm, y, b.Cp, b.Cpp, t);
    const double dgamma =
        (dot(a.L.prev.u0, y - b.Cm) - b.base_prev) + (dot(a.L.cur.u0, b.Cp - y) - b.base_cur);
    a.phase = std::exp(cplx(0.0, b.kappa * dgamma));
    return a;
}

// outputs: 0 full integrand, 1 <w>_k(y), 2 phase * <w>_k(y), 3..5 Extended columns
std::vector<CVec3> velocity_ball(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                                 const OperatorParams& p, bool extended, BSDiagnostics* diag) {
    const BallSetup b = ball_setup(f, C, k, t, p);
    const int outputs = extended ? 6 : 3;
    auto F = [&](const Vec3& y, CVec3* out) {
        const AtY a = at_y(f, b, y, t);
        out[0] = a.phase * symbol(a.L.w, a.L.g1, a.L.g0, b.kappa);
        const Vec3 avg = segment_moments_exact(f, b.mid, y, t).w0();
        out[1] = CVec3{avg};
        out[2] = a.phase * CVec3{avg};
        if (extended)
            for (int m = 0; m < 3; ++m) out[3 + m] = a.phase * CVec3{Vec3{}, -b.kappa * cross(kE[m], a.L.g0)};
    };
    std::vector<CVec3> r = bs_ball(F, outputs, b.C0, p.ball_config(), diag);
    const double inv_log = 1.0 / p.log_inv_rho();
    for (auto& v : r) v = inv_log * v;
    return r;
}

void velocity_decomposition(OperatorResult& r, const std::vector<CVec3>& ball, const Vec3& u) {
    r.decomposition = {{"u", CVec3{u}},
                       {"r_total", r.value - CVec3{u}},
                       {"r_bs", ball[1] - CVec3{u}},
                       {"r_vel1", r.value - ball[2]},
                       {"r_vel2", ball[2] - ball[1]}};
}

}  // namespace

CVec3 velocity_integrand(const AnalyticField& f, const PolygonalLoop& C, long long k, const Vec3& y, double t,
                         const OperatorParams& p) {
    const BallSetup b = ball_setup(f, C, k, t, p);
    const AtY a = at_y(f, b, y, t);
    return a.phase * symbol(a.L.w, a.L.g1, a.L.g0, b.kappa);
}

CVec3 velocity_integrand_fd(const AnalyticField& f, const PolygonalLoop& C, long long k, const Vec3& y, double t,
                            const OperatorParams& p, const QuadratureConfig& q) {
    PolygonalLoop P = C;
    P.vertex_mut(k) = y;
    return (1.0 / psi_of(f, C, t, p, q)) * curl_pair_fd(f, P, t, p, q, single_vertex(k + 1), single_vertex(k));
}

OperatorResult velocity_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                           const OperatorParams& p, const QuadratureConfig& q, BSDiagnostics* diag) {
    validate(p);
    const std::vector<CVec3> ball = velocity_ball(f, C, k, t, p, false, diag);
    OperatorResult r = finish(ball[0], psi_of(f, C, t, p, q));
    velocity_decomposition(r, ball, eval_velocity(f, C.vertex(k), t));
    return r;
}

ExtendedVelocity extended_velocity_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                                  const OperatorParams& p, const QuadratureConfig& q) {
    validate(p);
    check_extended_index(C, k);
    const std::vector<CVec3> ball = velocity_ball(f, C, k, t, p, true, nullptr);
    ExtendedVelocity m;
    m.base = ball[0];
    for (int i = 0; i < 3; ++i) m.T[i] = ball[3 + i];
    m.g_rest = gradient_sum(f, C, k + 2, C.size() - 1, t);
    CVec3 v = m.base;
    for (int i = 0; i < 3; ++i) v += m.g_rest[i] * m.T[i];
    m.result = finish(v, psi_of(f, C, t, p, q));
    std::vector<CVec3> adj = ball;
    for (int i = 0; i < 3; ++i) adj[2] += m.g_rest[i] * m.T[i];
    velocity_decomposition(m.result, adj, eval_velocity(f, C.vertex(k), t));
    return m;
}

std::array<CVec3, 3> curl_pair_on_product(const AnalyticField& f, const PolygonalLoop& C, double t,
                                          const OperatorParams& p, const QuadratureConfig& q,
                                          const VertexDirection& Da, const VertexDirection& Db, const CVec3& S,
                                          const LoopVectorFn& X) {
    Vec3 ga, gb;
    for (const auto& [j, w] : Da.terms) ga += w * vertex_gradient(f, C, j, t);
    for (const auto& [j, w] : Db.terms) gb += w * vertex_gradient(f, C, j, t);
    const CVec3 X0 = X(C);
    CVec3 dA[3], dB[3], dAB[3][3];
    for (int a = 0; a < 3; ++a) {
        dA[a] = central_derivative<CVec3>([&](double s) { return X(perturbed(C, Da, s * kE[a])); }, q.fd_step,
                                          q.richardson_levels);
        dB[a] = central_derivative<CVec3>([&](double s) { return X(perturbed(C, Db, s * kE[a])); }, q.fd_step,
                                          q.richardson_levels);
    }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            dAB[a][b] = mixed_derivative<CVec3>(
                [&](double s1, double s2) { return X(perturbed(perturbed(C, Da, s1 * kE[a]), Db, s2 * kE[b])); },
                q.fd_step_mixed, q.richardson_levels);
    const cplx inu(0.0, p.nu / p.gamma);
    std::array<CVec3, 3> out;
    for (int m = 0; m < 3; ++m) {
        CVec3 r;
        for (int l = 0; l < 3; ++l) {
            const int pp = (l + 1) % 3, qq = (l + 2) % 3;  // eps_{l pp qq} = +1
            const cplx first = (dA[pp][m] * gb[qq] - dA[qq][m] * gb[pp]) + (ga[pp] * dB[qq][m] - ga[qq] * dB[pp][m]);
            const cplx second = dAB[pp][qq][m] - dAB[qq][pp][m];
            r.set(l, X0[m] * S[l] - first + inu * second);
        }
        out[m] = r;
    }
    return out;
}

CVec3 cross_contract(const std::array<CVec3, 3>& w) {
    // (alpha) = eps_{alpha l m} w[m][l]
    CVec3 r;
    r.set(0, w[2][1] - w[1][2]);
    r.set(1, w[0][2] - w[2][0]);
    r.set(2, w[1][0] - w[0][1]);
    return r;
}

OperatorResult advection_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                            const OperatorParams& p, const QuadratureConfig& q) {
    validate(p);
    if (C.size() < 8) throw std::invalid_argument("advection_op: N must be >= 8");
    const OperatorResult U = velocity_op(f, C, k, t, p, q);
    const OperatorResult W = vorticity_op(f, C, k + 3, t, p, q);
    // U_k Psi / Psi depends on C_{k-1}..C_{k+2} only, so Omega_{k+3} sees it as a constant factor.
    OperatorResult r = finish(cross(W.value, U.value), U.psi);
    const Vec3 x = C.vertex(k);
    const Vec3 target = cross(eval_vorticity(f, x, t), eval_velocity(f, x, t));
    r.decomposition = {{"target", CVec3{target}}, {"r_adv", r.value - CVec3{target}}};
    return r;
}

LoopResidual loop_equation_residual(const AnalyticField& f, const PolygonalLoop& C, double t,
                                    const OperatorParams& p, const QuadratureConfig& q) {
    validate(p);
    if (C.size() != p.N) throw std::invalid_argument("loop_equation_residual: loop size must equal N");
    if (f.law.is_static()) throw std::invalid_argument("loop_equation_residual: field has no time law");
    LoopResidual res;
    res.dt_psi = dt_loop_functional(f, C, t, p.gamma, p.nu, q);
    const cplx psi = psi_of(f, C, t, p, q);
    const double kappa = p.gamma / p.nu;
    cplx adv = 0.0, diff = 0.0;
    for (long long k = 0; k < C.size(); ++k) {
        BSDiagnostics d;
        const std::vector<CVec3> ball = velocity_ball(f, C, k, t, p, false, &d);
        res.worst_ball_change = std::max(res.worst_ball_change, d.last_change);
        const Local W = local_at(f, C, k + 3, t);
        const CVec3 a = cross(symbol(W.w, W.g1, W.g0, kappa), ball[0]);
        const Local L = local_at(f, C, k, t);
        const SecondDerivatives D = second_derivatives(f, C, k, t, q.nodes_per_segment);
        const CVec3 dk = diffusion_symbol(D, L.g1, D.J1, L.g0, symbol(L.w, L.g1, L.g0, kappa), kappa);
        const CVec3 e{edge(C, k)};
        adv += dot(e, a);
        diff += dot(e, dk);
    }
    res.advection_sum = psi * adv;
    res.diffusion_sum = psi * diff;
    const cplx ik(0.0, kappa);
    res.r_loop = res.dt_psi + ik * (res.advection_sum + p.nu * res.diffusion_sum);
    res.r_loop_flipped = res.dt_psi - ik * (res.advection_sum - p.nu * res.diffusion_sum);
    return res;
}

LiquidResidual liquid_residual(const AnalyticField& f, const PolygonalLoop& C, double t, const OperatorParams& p,
                               const QuadratureConfig& q) {
    if (!(p.gamma > 0.0) || !(p.nu > 0.0)) throw std::invalid_argument("liquid_residual: gamma, nu must be > 0");
    const int N = C.size();
    if (N < 4) throw std::invalid_argument("liquid_residual: N must be >= 4");
    const double kappa = p.gamma / p.nu;
    const cplx psi = psi_of(f, C, t, p, q);
    const double dt_circ =
        loop_line_integral(C, q.nodes_per_segment, [&](const Vec3& x) { return eval_dt_velocity(f, x, t); });
    const double curl_circ =
        loop_line_integral(C, q.nodes_per_segment, [&](const Vec3& x) { return eval_curl_vorticity(f, x, t); });
    cplx sum = 0.0;
    for (long long k = 1; k <= N - 2; ++k) {
        const Local L = local_at(f, C, k, t);
        const Vec3 G = L.g1 + gradient_sum(f, C, k + 2, N - 1, t);
        const SecondDerivatives D = second_derivatives(f, C, k, t, q.nodes_per_segment);
        const CVec3 dk = diffusion_symbol(D, G, D.J1, L.g0, symbol(L.w, G, L.g0, kappa), kappa);
        sum += dot(CVec3{edge(C, k)}, dk);
    }
    LiquidResidual r;
    const cplx dt_psi = cplx(0.0, kappa) * psi * dt_circ;
    r.lhs = dt_psi + cplx(0.0, p.gamma) * psi * sum;
    const double rhs_int = dt_circ + p.nu * curl_circ;
    r.rhs_derived = cplx(0.0, kappa) * psi * rhs_int;
    r.rhs_plain = psi * rhs_int;
    r.residual = r.lhs - r.rhs_derived;
    r.residual_plain = r.lhs - r.rhs_plain;
    return r;
}

RbadReport rbad_probe(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                      const OperatorParams& p, const QuadratureConfig& q) {
    validate(p);
    const int N = C.size();
    if (k < 2 || k > N - 5) throw std::invalid_argument("rbad_probe: k must be in [2, N-5]");
    const ExtendedVelocity U = extended_velocity_op(f, C, k, t, p, q);
    const OperatorResult W = extended_vorticity_op(f, C, k + 3, t, p, q);
    // U^M_k Psi / Psi = base + T . G_rest(C); base and T depend on C_{k-1}..C_{k+2} only.
    const LoopVectorFn X = [&](const PolygonalLoop& P) {
        const Vec3 g = gradient_sum(f, P, k + 2, N - 1, t);
        CVec3 v = U.base;
        for (int i = 0; i < 3; ++i) v += g[i] * U.T[i];
        return v;
    };
    const auto on = curl_pair_on_product(f, C, t, p, q, extended_direction(N, k + 3), single_vertex(k + 3), W.value, X);
    RbadReport r;
    r.N = N;
    r.k = k;
    r.result = cross_contract(on);
    const Vec3 x = C.vertex(k);
    r.target = CVec3{cross(eval_vorticity(f, x, t), eval_velocity(f, x, t))};
    r.factorized = cross(W.value, U.result.value);
    r.total = norm(r.result - r.target);
    r.r_bad = norm(r.result - r.factorized);
    r.r_bad_log = r.r_bad * std::log(static_cast<double>(N));
    return r;
}

}  // namespace looplab

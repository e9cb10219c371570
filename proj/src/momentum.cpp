#include "looplab/momentum.hpp"

#include "looplab/biot_savart.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace looplab {

namespace {

const cplx I(0.0, 1.0);

void check_nonsingular(const Vec3& d, const char* who) {
    if (norm2(d) == 0.0) throw std::domain_error(fmt::format("{}: singular state, |dP_(k-1)| = 0", who));
}

CVec3 cross_c(const CVec3& a, const CVec3& b) { return cross(a, b); }

// dP_k - dP_{k-1} (dP_{k-1}.dP_k)/|dP_{k-1}|^2
Vec3 transverse(const Vec3& dk, const Vec3& dkm) { return dk - (dot(dkm, dk) / norm2(dkm)) * dkm; }

// dP_k |dP_{k-1}|^2 - dP_{k-1}(dP_{k-1}.dP_k)
Vec3 bivector(const Vec3& dk, const Vec3& dkm) { return norm2(dkm) * dk - dot(dkm, dk) * dkm; }

}  // namespace

void validate(const MomentumState& s, const MomentumLimits& lim) {
    const int N = s.size();
    if (N < 3) throw std::invalid_argument("momentum state: need at least 3 momenta");
    if (lim.require_p0_zero && !(s.P[0] == CVec3{})) throw std::invalid_argument("momentum state: P_0 must be 0");
    for (int k = 0; k < N; ++k) {
        const CVec3 d = s.dP(k);
        if (norm(d.im) > lim.imag_tol)
            throw std::invalid_argument(fmt::format("momentum state: Im dP_{} = {:.3e} is not zero", k, norm(d.im)));
        const double n = norm(d.re);
        if (n < 1.0 / lim.lambda || n > lim.lambda)
            throw std::invalid_argument(fmt::format("momentum state: |dP_{}| = {:.3e} outside [1/L, L]", k, n));
    }
}

PsiMomentum psi_momentum(const MomentumState& s, const PolygonalLoop& C, double gamma, double nu) {
    if (s.size() != C.size()) throw std::invalid_argument("psi_momentum: state and loop sizes differ");
    const int N = C.size();
    cplx a = 0.0, b = 0.0;
    for (int k = 0; k < N; ++k) {
        a += dot(s.at(k), CVec3{edge(C, k)});
        b += dot(CVec3{C.vertex(k)}, s.dP(k - 1));
    }
    const cplx ik(0.0, gamma / nu);
    PsiMomentum r;
    r.increments = std::exp(ik * a);
    r.vertices = std::exp(-ik * b);
    r.mismatch = std::abs(r.increments - r.vertices);
    if (r.mismatch > 1e-9)
        throw std::logic_error(fmt::format("psi_momentum: forms disagree by {:.3e}", r.mismatch));
    return r;
}

ClosedActions closed_operator_actions(const MomentumState& s, long long k, const OperatorParams& p,
                                      RemainderForm form) {
    const Vec3 dk = s.dP_real(k), dkm = s.dP_real(k - 1);
    check_nonsingular(dkm, "closed_operator_actions");
    const double kappa = p.gamma / p.nu;
    ClosedActions a;
    a.vorticity = CVec3{Vec3{}, -kappa * cross(dk, dkm)};
    a.diffusion = CVec3{-2.0 * kappa * kappa * bivector(dk, dkm)};
    a.kappa_arg = std::pow(static_cast<double>(p.N), p.alpha) * kappa * norm(dkm);
    a.remainder = remainder_R(a.kappa_arg, form);
    const Vec3 bare = (-1.0 / p.log_inv_rho()) * transverse(dk, dkm);
    a.velocity_bare = CVec3{bare};
    a.velocity = CVec3{(1.0 + a.remainder) * bare};
    return a;
}

CVec3 e_k(const MomentumState& s, long long k, const OperatorParams& p, EkIndex idx) {
    if (s.size() < 8) throw std::invalid_argument("e_k: N must be >= 8");
    const Vec3 dk = s.dP_real(k), dkm = s.dP_real(k - 1);
    check_nonsingular(dkm, "e_k");
    const double kappa = p.gamma / p.nu;
    const Vec3 pair = cross(s.dP_real(k + 3), s.dP_real(idx == EkIndex::KPlus2 ? k + 2 : k + 1));
    const Vec3 first = (kappa / p.log_inv_rho()) * cross(pair, transverse(dk, dkm));
    const Vec3 second = (2.0 * p.gamma * p.gamma / p.nu) * bivector(dk, dkm);
    return CVec3{second, first};
}

CVec3 e_k_composed(const MomentumState& s, long long k, const OperatorParams& p) {
    const ClosedActions w = closed_operator_actions(s, k + 3, p);
    const ClosedActions a = closed_operator_actions(s, k, p);
    return cross_c(w.vorticity, a.velocity_bare) - p.nu * a.diffusion;
}

CVec3 extended_e_k_linear(const MomentumState& s, long long k, double gamma, int N) {
    const Vec3 d = s.dP_real(k - 1);
    check_nonsingular(d, "extended_e_k");
    const CVec3 m = s.mid(k);
    const CVec3 dc{d};
    const cplx md = dot(m, dc);
    const cplx coef = (I * gamma / std::log(static_cast<double>(N))) * (md * md / norm2(d) - dot(m, m));
    return coef * dc;
}

CVec3 liquid_e_k(const MomentumState& s, long long k, double gamma, double nu) {
    (void)nu;  // the liquid system is stated at nu = 1
    const Vec3 d = s.dP_real(k - 1);
    const CVec3 m = s.mid(k);
    const CVec3 dc{d};
    return (gamma * gamma) * (dot(m, dc) * dc - norm2(d) * m);
}

CVec3 extended_e_k(const MomentumState& s, long long k, double gamma, double nu, int N) {
    return extended_e_k_linear(s, k, gamma, N) + liquid_e_k(s, k, gamma, nu);
}

std::string to_string(SystemVariant v) {
    switch (v) {
        case SystemVariant::Drift: return "drift";
        case SystemVariant::Extended: return "extended";
        case SystemVariant::Liquid: return "liquid";
    }
    return "?";
}

SystemVariant parse_system_variant(const std::string& s) {
    if (s == "drift") return SystemVariant::Drift;
    if (s == "extended") return SystemVariant::Extended;
    if (s == "liquid") return SystemVariant::Liquid;
    throw std::invalid_argument("unknown system variant '" + s + "' (drift, extended, liquid)");
}

namespace {

std::vector<MomentumState> derivatives(const MomentumTrajectory& tr) {
    const std::size_t m = tr.t.size();
    std::vector<MomentumState> d(m);
    if (tr.dPdt) {
        for (std::size_t i = 0; i < m; ++i) d[i] = tr.dPdt(tr.t[i]);
        return d;
    }
    if (m < 5) throw std::invalid_argument("system_residual: need >= 5 time points without an exact law");
    const double h = tr.t[1] - tr.t[0];
    for (std::size_t i = 1; i + 1 < m; ++i)
        if (std::abs((tr.t[i + 1] - tr.t[i]) - h) > 1e-12 * std::max(1.0, std::abs(h)))
            throw std::invalid_argument("system_residual: finite differences need a uniform time grid");
    for (std::size_t i = 2; i + 2 < m; ++i) {
        MomentumState s;
        const int N = tr.states[i].size();
        s.P.resize(N);
        for (int k = 0; k < N; ++k)
            s.P[k] = (1.0 / (12.0 * h)) * (tr.states[i - 2].P[k] - 8.0 * tr.states[i - 1].P[k] +
                                           8.0 * tr.states[i + 1].P[k] - tr.states[i + 2].P[k]);
        d[i] = s;
    }
    return d;
}

}  // namespace

SystemResidual system_residual(const MomentumTrajectory& traj, SystemVariant v, const OperatorParams& p) {
    if (traj.t.size() != traj.states.size()) throw std::invalid_argument("system_residual: t and states differ in length");
    const std::vector<MomentumState> d = derivatives(traj);
    SystemResidual out;
    out.variant = v;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        if (d[i].P.empty()) continue;
        const MomentumState& s = traj.states[i];
        const int N = s.size();
        std::vector<CVec3> r(N);
        for (int k = 0; k < N; ++k) {
            switch (v) {
                case SystemVariant::Drift: r[k] = d[i].P[k] - e_k(s, k, p); break;
                case SystemVariant::Extended:
                    r[k] = d[i].mid(k) - extended_e_k(s, k, p.gamma, p.nu, N);
                    break;
                case SystemVariant::Liquid: r[k] = d[i].mid(k) - liquid_e_k(s, k, p.gamma, p.nu); break;
            }
        }
        if (v == SystemVariant::Drift) {
            CVec3 avg;
            for (const auto& x : r) avg += x;
            avg = (1.0 / N) * avg;
            for (auto& x : r) x -= avg;
        }
        for (int k = 0; k < N; ++k) {
            const double n = norm(r[k]);
            out.rows.push_back({traj.t[i], k, n});
            out.max_residual = std::max(out.max_residual, n);
        }
    }
    return out;
}

std::string trajectory_csv(const MomentumTrajectory& traj) {
    std::string s = "t,k,re_x,re_y,re_z,im_x,im_y,im_z\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i)
        for (int k = 0; k < traj.states[i].size(); ++k) {
            const CVec3& P = traj.states[i].P[k];
            s += fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", traj.t[i], k, P.re.x,
                             P.re.y, P.re.z, P.im.x, P.im.y, P.im.z);
        }
    return s;
}

std::string residual_csv(const SystemResidual& r, const OperatorParams& p) {
    std::string s = fmt::format("# variant={} gamma={:.17g} nu={:.17g} alpha={:.17g} N={}\nt,k,residual\n",
                                to_string(r.variant), p.gamma, p.nu, p.alpha, p.N);
    for (const auto& row : r.rows) s += fmt::format("{:.17g},{},{:.17g}\n", row.t, row.k, row.residual);
    return s;
}

}  // namespace looplab

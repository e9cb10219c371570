#include "looplab/euler_ensemble.hpp"

#include "looplab/geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace looplab {

double ConditionErrors::max() const { return std::max({unit_edges, orthogonal, equal_radii, hidden}); }

StarPolygonEnsemble construct(int q, int p, const Vec3& normal) {
    if (q < 3) throw std::invalid_argument("star polygon: q must be >= 3");
    if (p < 1 || 2 * p >= q) throw std::invalid_argument(fmt::format("star polygon: need 1 <= p < q/2, got {}/{}", q, p));
    if (std::gcd(p, q) != 1) throw std::invalid_argument(fmt::format("star polygon: gcd({}, {}) != 1", p, q));
    if (!(norm(normal) > 0.0)) throw std::invalid_argument("star polygon: zero normal");
    StarPolygonEnsemble e;
    e.q = q;
    e.p = p;
    e.normal = normal / norm(normal);
    Vec3 e1, e2;
    plane_basis(e.normal, e1, e2);
    const double half = kPi * p / q;
    // chord 2R sin(half) = 1; |f_k + f_{k+1}| = 2R cos(half) = 2|A|
    e.radius = 1.0 / (2.0 * std::sin(half));
    e.A = (e.radius * std::cos(half)) * e.normal;
    e.f.resize(q);
    for (int k = 0; k < q; ++k) {
        const double th = 2.0 * kPi * static_cast<double>((static_cast<long long>(p) * k) % q) / q;
        e.f[k] = e.radius * (std::cos(th) * e1 + std::sin(th) * e2);
    }
    const double err = check_conditions(e).max();
    if (err > 1e-12) throw std::logic_error(fmt::format("star polygon {}/{}: conditions fail by {:.3e}", q, p, err));
    return e;
}

ConditionErrors check_conditions(const StarPolygonEnsemble& e) {
    ConditionErrors c;
    for (int k = 0; k < e.q; ++k) {
        const Vec3& fk = e.f[k];
        const Vec3& fm = e.f[cyc(k - 1, e.q)];
        const Vec3& fp = e.f[cyc(k + 1, e.q)];
        c.unit_edges = std::max(c.unit_edges, std::abs(norm2(fk - fm) - 1.0));
        c.orthogonal = std::max(c.orthogonal, std::abs(dot(e.A, fk)));
        c.equal_radii = std::max(c.equal_radii, std::abs(norm2(fk) - norm2(fm)));
        c.hidden = std::max(c.hidden, std::abs(4.0 * norm2(e.A) - norm2(fk + fp)));
    }
    return c;
}

Iabc verify_Iabc(const StarPolygonEnsemble& e, long long k) {
    const CVec3 F = 0.5 * (e.G(k) + e.G(k - 1));
    const CVec3 dF = e.G(k) - e.G(k - 1);
    const cplx FdF = dot(F, dF);
    const double dF2 = dot(dF, dF).real();
    Iabc r;
    r.FF = dot(F, F);
    r.Fnorm = norm(F);
    r.Ia = (FdF * FdF / dF2 - r.FF) * dF;
    r.Ib = FdF * dF;
    r.Ic = (1.0 - dF2) * F;
    return r;
}

double EnsembleTrajectory::scale(double t) const {
    if (!(t + t0 > 0.0)) throw std::invalid_argument("ensemble trajectory: t must exceed -t0");
    return 1.0 / std::sqrt(2.0 * (t + t0));
}

MomentumState EnsembleTrajectory::state(double t) const {
    const double s = scale(t) / gamma;
    MomentumState m;
    for (int k = 0; k < ensemble.q; ++k) m.P.push_back(s * ensemble.G(k));
    return m;
}

MomentumState EnsembleTrajectory::rate(double t) const {
    const double s = scale(t);
    const double c = -s * s * s / gamma;
    MomentumState m;
    for (int k = 0; k < ensemble.q; ++k) m.P.push_back(c * ensemble.G(k));
    return m;
}

EnsembleResiduals trajectory_residuals(const EnsembleTrajectory& tr, SystemVariant v, const std::vector<double>& times) {
    if (v == SystemVariant::Drift) throw std::invalid_argument("trajectory_residuals: variant must be extended or liquid");
    EnsembleResiduals out;
    out.variant = v;
    const int N = tr.ensemble.q;
    for (double t : times) {
        const MomentumState s = tr.state(t);
        const MomentumState d = tr.rate(t);
        for (int k = 0; k < N; ++k) {
            const CVec3 E = v == SystemVariant::Extended ? extended_e_k(s, k, tr.gamma, 1.0, std::max(N, 2))
                                                       : liquid_e_k(s, k, tr.gamma, 1.0);
            const double r = norm(d.mid(k) - E);
            const double im = norm(s.dP(k).im);
            out.rows.push_back({t, k, r, im});
            out.max_residual = std::max(out.max_residual, r);
            out.max_imag_increment = std::max(out.max_imag_increment, im);
        }
    }
    return out;
}

std::string ensemble_residual_csv(const EnsembleTrajectory& tr, const EnsembleResiduals& r) {
    std::string s = fmt::format("# ensemble={}/{} t0={:.17g} gamma={:.17g} variant={}\nt,k,residual,imag_increment\n",
                                tr.ensemble.q, tr.ensemble.p, tr.t0, tr.gamma, to_string(r.variant));
    for (const auto& row : r.rows)
        s += fmt::format("{:.17g},{},{:.17g},{:.17g}\n", row.t, row.k, row.residual, row.imag_increment);
    return s;
}

std::vector<int> star_steps(int q) {
    std::vector<int> ps;
    for (int p = 1; 2 * p < q; ++p)
        if (std::gcd(p, q) == 1) ps.push_back(p);
    return ps;
}

}  // namespace looplab

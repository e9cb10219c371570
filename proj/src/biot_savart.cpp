#include "looplab/biot_savart.hpp"

#include "looplab/fit.hpp"
#include "looplab/parallel.hpp"
#include "looplab/quadrature.hpp"
#include "looplab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace looplab {

namespace {

double h_bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double cutoff_chi(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double p = h_bump(2.0 - r);
    const double m = h_bump(r - 1.0);
    return p / (p + m);
}

// On (1,2), chi = 1/(1+E) with E = exp(1/a - 1/b), a = 2-r, b = r-1, so
// chi' = -chi (1-chi) (1/a^2 + 1/b^2).
double cutoff_chi_d1(double r) {
    if (r <= 1.0 || r >= 2.0) return 0.0;
    const double a = 2.0 - r, b = r - 1.0;
    const double c = cutoff_chi(r);
    return -c * (1.0 - c) * (1.0 / (a * a) + 1.0 / (b * b));
}

double cutoff_chi_d2(double r) {
    if (r <= 1.0 || r >= 2.0) return 0.0;
    const double a = 2.0 - r, b = r - 1.0;
    const double c = cutoff_chi(r);
    const double c1 = cutoff_chi_d1(r);
    const double q = 1.0 / (a * a) + 1.0 / (b * b);
    const double dq = 2.0 / (a * a * a) - 2.0 / (b * b * b);
    return -c1 * (1.0 - 2.0 * c) * q - c * (1.0 - c) * dq;
}

const std::string& cutoff_definition() {
    static const std::string s = "chi(r)=h(2-r)/(h(2-r)+h(r-1)); h(t)=exp(-1/t) for t>0 else 0";
    return s;
}

std::uint64_t cutoff_definition_hash() {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : cutoff_definition()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void validate(const BSConfig& c) {
    if (!(c.ell > 0.0) || !std::isfinite(c.ell)) throw std::invalid_argument("BSConfig: ell must be positive");
    if (!(c.panel_length > 0.0)) throw std::invalid_argument("BSConfig: panel_length must be positive");
    if (c.radial_nodes < 1 || c.n_theta < 1 || c.n_phi < 1)
        throw std::invalid_argument("BSConfig: node counts must be positive");
    if (c.max_refine < 0) throw std::invalid_argument("BSConfig: max_refine must be >= 0");
}

namespace {

struct BallRule {
    std::vector<double> r, wr;  // radial nodes and weights including (ell r chi'(ell r) - chi(ell r)) / 4pi
    std::vector<Vec3> n;
    std::vector<double> wn;
};

BallRule make_ball_rule(const BSConfig& c, int level) {
    BallRule b;
    const int scale = 1 << level;
    const double R1 = 1.0 / c.ell;
    const int panels = std::max(4, static_cast<int>(std::ceil(R1 / c.panel_length))) * scale;
    for (int half = 0; half < 2; ++half) {
        const GaussRule g = composite(half * R1, (half + 1) * R1, panels, c.radial_nodes);
        for (int i = 0; i < g.size(); ++i) {
            const double r = g.x[i];
            const double lr = c.ell * r;
            const double w = lr * cutoff_chi_d1(lr) - cutoff_chi(lr);
            if (w == 0.0) continue;
            b.r.push_back(r);
            b.wr.push_back(g.w[i] * w / (4.0 * kPi));
        }
    }
    const GaussRule& gt = gauss01(c.n_theta * scale);
    const int nphi = c.n_phi * scale;
    for (int i = 0; i < gt.size(); ++i) {
        const double ct = 2.0 * gt.x[i] - 1.0;
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < nphi; ++j) {
            const double ph = 2.0 * kPi * (j + 0.5) / nphi;
            b.n.push_back({st * std::cos(ph), st * std::sin(ph), ct});
            b.wn.push_back(2.0 * gt.w[i] * 2.0 * kPi / nphi);
        }
    }
    return b;
}

std::vector<CVec3> ball_pass(const std::function<void(const Vec3&, CVec3*)>& F, int outputs, const Vec3& x,
                             const BallRule& b) {
    const std::size_t nr = b.r.size();
    std::vector<CVec3> partial(nr * outputs);
    parallel_for(nr, [&](std::size_t i) {
        std::vector<CVec3> acc(outputs), val(outputs);
        for (std::size_t j = 0; j < b.n.size(); ++j) {
            const Vec3& n = b.n[j];
            F(x + b.r[i] * n, val.data());
            const CVec3 cn{n, Vec3{}};
            for (int o = 0; o < outputs; ++o) acc[o] += b.wn[j] * cross(val[o], cn);
        }
        for (int o = 0; o < outputs; ++o) partial[i * outputs + o] = b.wr[i] * acc[o];
    });
    std::vector<CVec3> out(outputs);
    for (std::size_t i = 0; i < nr; ++i)
        for (int o = 0; o < outputs; ++o) out[o] += partial[i * outputs + o];
    return out;
}

}  // namespace

std::vector<CVec3> bs_ball(const std::function<void(const Vec3&, CVec3*)>& F, int outputs, const Vec3& x,
                           const BSConfig& cfg, BSDiagnostics* diag) {
    validate(cfg);
    if (outputs < 1) throw std::invalid_argument("bs_ball: outputs must be positive");
    BSDiagnostics d;
    BallRule rule = make_ball_rule(cfg, 0);
    std::vector<CVec3> cur = ball_pass(F, outputs, x, rule);
    d.evaluations = static_cast<long long>(rule.r.size() * rule.n.size());
    for (int level = 1; level <= cfg.max_refine; ++level) {
        rule = make_ball_rule(cfg, level);
        std::vector<CVec3> next = ball_pass(F, outputs, x, rule);
        d.evaluations += static_cast<long long>(rule.r.size() * rule.n.size());
        double diff = 0.0, mag = 0.0;
        for (int o = 0; o < outputs; ++o) {
            diff = std::max(diff, norm(next[o] - cur[o]));
            mag = std::max(mag, norm(next[o]));
        }
        d.levels_used = level + 1;
        d.last_change = diff / std::max(mag, 1e-300);
        cur = std::move(next);
        d.converged = d.last_change <= cfg.refine_tol || diff <= cfg.refine_tol * 1e-6;
        if (d.converged) break;
    }
    if (diag) *diag = d;
    return cur;
}

Vec3 bs_direct(const std::function<Vec3(const Vec3&)>& omega, const Vec3& x, const BSConfig& cfg,
               BSDiagnostics* diag) {
    auto F = [&](const Vec3& y, CVec3* out) { out[0] = CVec3{omega(y), Vec3{}}; };
    return bs_ball(F, 1, x, cfg, diag)[0].re;
}

CVec3 bs_direct_complex(const std::function<CVec3(const Vec3&)>& omega, const Vec3& x, const BSConfig& cfg,
                        BSDiagnostics* diag) {
    auto F = [&](const Vec3& y, CVec3* out) { out[0] = omega(y); };
    return bs_ball(F, 1, x, cfg, diag)[0];
}

namespace {

// Composite Gauss rule on [1,2] fine enough for cos(kappa s) up to the given kappa.
const GaussRule& unit_rule(double kappa) {
    static std::mutex mu;
    static std::vector<std::pair<int, GaussRule>> cache;
    const int panels = 32 + static_cast<int>(std::ceil(std::abs(kappa) / 4.0));
    int bucket = 32;
    while (bucket < panels) bucket *= 2;
    std::lock_guard<std::mutex> lock(mu);
    for (auto& [p, g] : cache)
        if (p == bucket) return g;
    cache.emplace_back(bucket, composite(1.0, 2.0, bucket, 16));
    return cache.back().second;
}

}  // namespace

double remainder_R(double kappa, RemainderForm form) {
    const GaussRule& g = unit_rule(kappa);
    double rc = 0.0, sinc_part = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double s = g.x[i];
        const double c1 = cutoff_chi_d1(s);
        rc += g.w[i] * c1 * std::cos(kappa * s);
        if (form == RemainderForm::SingleTerm) {
            const double ks = kappa * s;
            sinc_part += g.w[i] * c1 * (ks == 0.0 ? 1.0 : std::sin(ks) / ks);
        }
    }
    return form == RemainderForm::Derived ? rc : rc - sinc_part;
}

double remainder_R_radial(double kappa, double c) {
    const GaussRule& g = unit_rule(kappa);
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double r = g.x[i];
        const double c1 = cutoff_chi_d1(r), c2 = cutoff_chi_d2(r);
        const double gr = (c2 + 2.0 * c1 / r) / r - c * c1 / (r * r);
        const double kr = kappa * r;
        acc += g.w[i] * gr * r * r * (kr == 0.0 ? 1.0 : std::sin(kr) / kr);
    }
    return -acc;
}

double remainder_R_d1(double kappa) {
    const GaussRule& g = unit_rule(kappa);
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double s = g.x[i];
        acc -= g.w[i] * cutoff_chi_d1(s) * s * std::sin(kappa * s);
    }
    return acc;
}

double remainder_R_d2(double kappa) {
    const GaussRule& g = unit_rule(kappa);
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double s = g.x[i];
        acc -= g.w[i] * cutoff_chi_d1(s) * s * s * std::cos(kappa * s);
    }
    return acc;
}

RemainderTable::RemainderTable(double spacing, double kappa_max) : h_(spacing), kmax_(kappa_max) {
    if (!(spacing > 0.0) || !(kappa_max > spacing)) throw std::invalid_argument("RemainderTable: bad grid");
    const std::size_t n = static_cast<std::size_t>(std::ceil(kappa_max / spacing)) + 1;
    kmax_ = (n - 1) * spacing;
    r_.resize(n);
    r1_.resize(n);
    r2_.resize(n);
    const GaussRule& g = unit_rule(kmax_);
    std::vector<double> wc(g.size());
    for (int i = 0; i < g.size(); ++i) wc[i] = g.w[i] * cutoff_chi_d1(g.x[i]);
    parallel_for(n, [&](std::size_t j) {
        const double k = j * h_;
        double a0 = 0.0, a1 = 0.0, a2 = 0.0;
        for (int i = 0; i < g.size(); ++i) {
            const double s = g.x[i];
            const double c = std::cos(k * s), sn = std::sin(k * s);
            a0 += wc[i] * c;
            a1 -= wc[i] * s * sn;
            a2 -= wc[i] * s * s * c;
        }
        r_[j] = a0;
        r1_[j] = a1;
        r2_[j] = a2;
    });
}

const RemainderTable& RemainderTable::instance() {
    static const RemainderTable t(1.0 / 32.0, 256.0);
    return t;
}

double RemainderTable::operator()(double kappa) const {
    kappa = std::abs(kappa);
    if (kappa >= kmax_) return remainder_R(kappa);
    const double u = kappa / h_;
    std::size_t j = static_cast<std::size_t>(u);
    if (j >= r_.size() - 1) j = r_.size() - 2;
    const double t = u - j;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double H1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double H2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double H3 = 10 * t3 - 15 * t4 + 6 * t5;
    const double H4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double H5 = 0.5 * (t3 - 2 * t4 + t5);
    return H0 * r_[j] + h_ * H1 * r1_[j] + h_ * h_ * H2 * r2_[j] + H3 * r_[j + 1] + h_ * H4 * r1_[j + 1] +
           h_ * h_ * H5 * r2_[j + 1];
}

CVec3 bs_wave_closed(const WaveMode& mode, const Vec3& x, double ell) {
    const double a2 = norm2(mode.a);
    const double kappa = std::sqrt(a2) / ell;
    const cplx ph = std::exp(cplx(0.0, dot(mode.a, x) + mode.phase));
    const CVec3 ac{mode.a / a2, Vec3{}};
    return (cplx(0.0, 1.0) * ph * (1.0 + RemainderTable::instance()(kappa))) * cross(ac, mode.v0);
}

namespace {

double gauss_hat(double w, double q2) { return std::pow(2.0 * kPi * w * w, 1.5) * std::exp(-0.5 * w * w * q2); }

}  // namespace

RecoveryTable recovery_error(const WindowedMode& m, const std::vector<double>& ells) {
    if (!(m.width > 0.0)) throw std::invalid_argument("recovery_error: width must be positive");
    RecoveryTable t;
    const GaussRule& gt = gauss01(32);
    const int nphi = 64;
    std::vector<Vec3> dirs;
    std::vector<double> dw;
    for (int i = 0; i < gt.size(); ++i) {
        const double ct = 2.0 * gt.x[i] - 1.0, st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < nphi; ++j) {
            const double ph = 2.0 * kPi * (j + 0.5) / nphi;
            dirs.push_back({st * std::cos(ph), st * std::sin(ph), ct});
            dw.push_back(2.0 * gt.w[i] * 2.0 * kPi / nphi);
        }
    }
    const double Q = norm(m.a) + 9.0 / m.width;
    const double norm_fac = std::pow(2.0 * kPi, -3.0);
    for (double ell : ells) {
        if (!(ell > 0.0)) throw std::invalid_argument("recovery_error: ell must be positive");
        std::vector<double> brk{0.0};
        for (double b = ell; b < Q; b *= 2.0) brk.push_back(b);
        const double amag = norm(m.a);
        for (double b : {amag - 9.0 / m.width, amag, amag + 9.0 / m.width})
            if (b > 0.0 && b < Q) brk.push_back(b);
        brk.push_back(Q);
        std::sort(brk.begin(), brk.end());
        brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
        double err2 = 0.0, u2 = 0.0;
        for (std::size_t s = 0; s + 1 < brk.size(); ++s) {
            const GaussRule g = composite(brk[s], brk[s + 1], 4, 8);
            for (int i = 0; i < g.size(); ++i) {
                const double k = g.x[i];
                const double R = RemainderTable::instance()(k / ell);
                double ang = 0.0;
                for (std::size_t d = 0; d < dirs.size(); ++d) {
                    const Vec3 kv = k * dirs[d];
                    const Vec3 pv = m.v0 - dot(dirs[d], m.v0) * dirs[d];
                    const double gh = gauss_hat(m.width, norm2(kv - m.a));
                    ang += dw[d] * norm2(pv) * gh * gh;
                }
                const double w = g.w[i] * k * k * ang * norm_fac;
                u2 += w;
                err2 += w * R * R;
            }
        }
        RecoveryRow row;
        row.ell = ell;
        row.error = std::sqrt(err2);
        row.relative = row.error / std::sqrt(u2);
        t.rows.push_back(row);
    }
    std::vector<double> xs, ys;
    for (auto& r : t.rows) {
        xs.push_back(r.ell);
        ys.push_back(r.error);
    }
    t.slope = fit_loglog(xs, ys).slope;
    return t;
}

RecoveryTable recovery_error(const AnalyticField& f, const std::vector<double>& ells) {
    RecoveryTable t;
    if (f.modes.size() != 1 || f.has_linear || norm(f.c0) != 0.0) {
        t.excluded = true;
        t.note = "non-decaying field without an L2 norm; only a single wave mode has a closed-form error";
        return t;
    }
    const WaveMode& w = f.modes[0];
    for (double ell : ells) {
        RecoveryRow row;
        row.ell = ell;
        row.relative = std::abs(RemainderTable::instance()(norm(w.a) / ell));
        row.error = row.relative * norm(w.v0);
        t.rows.push_back(row);
    }
    t.note = "pointwise amplitude |R(|a|/ell)| |v0|";
    std::vector<double> xs, ys;
    for (auto& r : t.rows) {
        xs.push_back(r.ell);
        ys.push_back(r.error);
    }
    t.slope = fit_loglog(xs, ys).slope;
    return t;
}

Vec3 windowed_vorticity(const WindowedMode& m, const Vec3& x) {
    if (norm(m.a) != 0.0) throw std::invalid_argument("windowed_vorticity: only a = 0 is supported");
    const double w2 = m.width * m.width;
    const double g = std::exp(-0.5 * norm2(x) / w2);
    return cross((-g / w2) * x, m.v0);
}

Vec3 windowed_bs_origin(const WindowedMode& m, double ell) {
    if (norm(m.a) != 0.0) throw std::invalid_argument("windowed_bs_origin: only a = 0 is supported");
    const double Q = 9.0 / m.width;
    std::vector<double> brk{0.0};
    for (double b = ell; b < Q; b *= 2.0) brk.push_back(b);
    brk.push_back(Q);
    double acc = 0.0;
    for (std::size_t s = 0; s + 1 < brk.size(); ++s) {
        const GaussRule g = composite(brk[s], brk[s + 1], 4, 8);
        for (int i = 0; i < g.size(); ++i) {
            const double k = g.x[i];
            acc += g.w[i] * 4.0 * kPi * k * k * (1.0 + RemainderTable::instance()(k / ell)) *
                   gauss_hat(m.width, k * k);
        }
    }
    return (2.0 / 3.0) * std::pow(2.0 * kPi, -3.0) * acc * m.v0;
}

PolygrowthReport polygrowth_check(double M, int m, const std::vector<double>& ells, const BSConfig& base, int points,
                                  std::uint64_t seed) {
    if (ells.empty()) throw std::invalid_argument("polygrowth_check: empty ell list");
    if (m < 0) throw std::invalid_argument("polygrowth_check: m must be >= 0");
    PolygrowthReport rep;
    rep.m = m;
    rep.M = M;
    CounterRng rng(seed, 3);
    std::vector<Vec3> xs;
    for (int i = 0; i < points; ++i) xs.push_back(rng.uniform_vec(-2.0, 2.0));
    const Vec3 e{0, 0, 1};
    auto omega = [&](const Vec3& y) { return (M * (1.0 + std::pow(norm(y), m))) * e; };
    std::vector<double> sorted = ells;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (double ell : sorted) {
        BSConfig c = base;
        c.ell = ell;
        PolygrowthRow row;
        row.ell = ell;
        for (const Vec3& x : xs) {
            const double bound = std::pow(ell, -m - 1.0) * M * (1.0 + std::pow(norm(x), m));
            row.max_ratio = std::max(row.max_ratio, norm(bs_direct(omega, x, c)) / bound);
        }
        rep.rows.push_back(row);
    }
    rep.C = std::max(rep.rows.front().max_ratio, 1e-12);
    for (auto& r : rep.rows) {
        r.bound_constant = rep.C;
        r.pass = r.max_ratio <= rep.C * (1.0 + 1e-9);
        rep.pass = rep.pass && r.pass;
    }
    return rep;
}

}  // namespace looplab

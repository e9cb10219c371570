#include "looplab/gaussian_mc.hpp"

#include "looplab/parallel.hpp"
#include "looplab/quadrature.hpp"
#include "looplab/rng.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace looplab {

namespace {

const cplx I(0.0, 1.0);

// e^{i k.x} as a complex number
cplx phase(const Vec3& k, const Vec3& x) {
    const double a = dot(k, x);
    return {std::cos(a), std::sin(a)};
}


}  // namespace

double GaussianSpec::lattice_step() const { return dk > 0.0 ? dk : kPi / (4.0 * diameter); }
double GaussianSpec::cutoff() const { return k_max > 0.0 ? k_max : 6.0 / r0; }
double GaussianSpec::box() const { return 2.0 * kPi / lattice_step(); }

void validate(const GaussianSpec& s) {
    if (!(s.r0 > 0.0)) throw std::invalid_argument("gaussian spec: r0 must be > 0");
    if (!(s.diameter > 0.0)) throw std::invalid_argument("gaussian spec: diameter must be > 0");
    if (s.cutoff() * s.r0 < 6.0 - 1e-12) throw std::invalid_argument("gaussian spec: need k_max r0 >= 6");
    if (s.lattice_step() > kPi / (4.0 * s.diameter) * (1.0 + 1e-12))
        throw std::invalid_argument("gaussian spec: need dk <= pi / (4 diameter)");
}

SpectralLattice build_lattice(const GaussianSpec& s) {
    validate(s);
    const double dk = s.lattice_step(), K = s.cutoff();
    const int n = static_cast<int>(std::floor(K / dk));
    const double vol = std::pow(dk / (2.0 * kPi), 3);
    SpectralLattice L;
    for (int i = -n; i <= n; ++i)
        for (int j = -n; j <= n; ++j)
            for (int l = -n; l <= n; ++l) {
                // keep the lexicographically positive half
                if (i < 0 || (i == 0 && (j < 0 || (j == 0 && l <= 0)))) continue;
                const Vec3 k{i * dk, j * dk, l * dk};
                const double k2 = norm2(k);
                if (k2 > K * K) continue;
                Vec3 e1, e2;
                plane_basis(k / std::sqrt(k2), e1, e2);
                L.k.push_back(k);
                L.sigma.push_back(std::sqrt(vol * std::exp(-s.r0 * s.r0 * k2)));
                L.e1.push_back(e1);
                L.e2.push_back(e2);
            }
    return L;
}

Vec3 FieldSample::velocity(const Vec3& x) const {
    Vec3 u;
    for (std::size_t j = 0; j < k.size(); ++j) u += 2.0 * (phase(k[j], x) * c[j]).re;
    return u;
}

double FieldSample::divergence(const Vec3& x) const {
    double d = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) d += 2.0 * std::real(I * phase(k[j], x) * dot(CVec3{k[j]}, c[j]));
    return d;
}

namespace {

// c_j = sigma_j ((z1 + i z2) e1 + (z3 + i z4) e2) / sqrt(2)
void draw(const SpectralLattice& L, const CounterRng& rng, std::vector<CVec3>& c) {
    c.resize(L.k.size());
    const double h = std::sqrt(0.5);
    for (std::size_t j = 0; j < L.k.size(); ++j) {
        double z1, z2, z3, z4;
        rng.normal_pair_at(2 * j, z1, z2);
        rng.normal_pair_at(2 * j + 1, z3, z4);
        const double s = h * L.sigma[j];
        c[j] = CVec3{s * (z1 * L.e1[j] + z3 * L.e2[j]), s * (z2 * L.e1[j] + z4 * L.e2[j])};
    }
}

}  // namespace

FieldSample sample_field(const SpectralLattice& L, std::uint64_t seed, std::uint64_t stream) {
    FieldSample f;
    f.seed = seed;
    f.stream = stream;
    f.k = L.k;
    draw(L, CounterRng(seed, stream), f.c);
    return f;
}

FieldSample sample_field(const GaussianSpec& s, std::uint64_t seed, std::uint64_t stream) {
    return sample_field(build_lattice(s), seed, stream);
}

Vec3 CurlGaussian::operator()(const Vec3& x) const {
    const Vec3 d = x - x0;
    const double phi = std::exp(-norm2(d) / (2.0 * s * s));
    // curl(a phi) = grad(phi) x a
    return cross((-phi / (s * s)) * d, a);
}

CVec3 CurlGaussian::transform(const Vec3& k) const {
    const double phi = std::pow(2.0 * kPi * s * s, 1.5) * std::exp(-0.5 * s * s * norm2(k));
    return (-I * phi * phase(k, x0)) * CVec3{cross(k, a)};
}

double heat_pairing(const CurlGaussian& f, const CurlGaussian& g, double r0) {
    const double beta = r0 * r0 + 0.5 * (f.s * f.s + g.s * g.s);
    const Vec3 d = f.x0 - g.x0;
    const double I0 = std::pow(4.0 * kPi * beta, -1.5) * std::exp(-norm2(d) / (4.0 * beta));
    // M_ij = int k_i k_j e^{-beta k^2 + i k.d} dk / (2 pi)^3
    auto M = [&](const Vec3& u, const Vec3& v) {
        return I0 * (dot(u, v) / (2.0 * beta) - dot(d, u) * dot(d, v) / (4.0 * beta * beta));
    };
    const double trM = I0 * (3.0 / (2.0 * beta) - norm2(d) / (4.0 * beta * beta));
    const double pref = std::pow(2.0 * kPi, 3) * std::pow(f.s * g.s, 3);
    return pref * (dot(f.a, g.a) * trM - M(f.a, g.a));
}

CovarianceReport covariance_check(const GaussianSpec& s, const std::vector<std::pair<CurlGaussian, CurlGaussian>>& pairs,
                                  int M, std::uint64_t seed) {
    if (M < 2) throw std::invalid_argument("covariance_check: need M >= 2");
    const SpectralLattice L = build_lattice(s);
    const std::size_t P = pairs.size(), n = L.k.size();
    std::vector<CVec3> ft(P * n), gt(P * n);
    std::vector<double> lattice(P, 0.0);
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t j = 0; j < n; ++j) {
            ft[p * n + j] = pairs[p].first.transform(L.k[j]);
            gt[p * n + j] = pairs[p].second.transform(L.k[j]);
            lattice[p] += 2.0 * L.sigma[j] * L.sigma[j] * std::real(hdot(gt[p * n + j], ft[p * n + j]));
        }
    std::vector<double> prod(static_cast<std::size_t>(M) * P);
    parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) {
        std::vector<CVec3> c;
        draw(L, CounterRng(seed, m), c);
        for (std::size_t p = 0; p < P; ++p) {
            double x = 0.0, y = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                x += 2.0 * std::real(dot(c[j], ft[p * n + j]));
                y += 2.0 * std::real(dot(c[j], gt[p * n + j]));
            }
            prod[m * P + p] = x * y;
        }
    });
    CovarianceReport r;
    r.samples = M;
    r.seed = seed;
    for (std::size_t p = 0; p < P; ++p) {
        double mean = 0.0, sq = 0.0;
        for (int m = 0; m < M; ++m) mean += prod[m * P + p];
        mean /= M;
        for (int m = 0; m < M; ++m) sq += std::pow(prod[m * P + p] - mean, 2);
        const double se = std::sqrt(sq / (M - 1) / M);
        const double exact = heat_pairing(pairs[p].first, pairs[p].second, s.r0);
        const double z = se > 0.0 ? (mean - exact) / se : 0.0;
        r.rows.push_back({mean, se, exact, lattice[p], z});
        r.max_abs_z = std::max(r.max_abs_z, std::abs(z));
    }
    return r;
}

std::string to_string(ExponentVariant v) { return v == ExponentVariant::Linear ? "linear" : "squared"; }

double loop_heat_energy(const PolygonalLoop& C, double r0, int nodes) {
    const GaussRule& g = gauss01(nodes);
    const int N = C.size();
    const double norm_c = std::pow(4.0 * kPi * r0 * r0, -1.5), inv = 1.0 / (4.0 * r0 * r0);
    std::vector<double> part(N, 0.0);
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t a) {
        const Vec3 ca = C.vertex(a), da = edge(C, a);
        double acc = 0.0;
        for (int b = 0; b < N; ++b) {
            const Vec3 cb = C.vertex(b), db = edge(C, b);
            double s = 0.0;
            for (int i = 0; i < g.size(); ++i)
                for (int j = 0; j < g.size(); ++j) {
                    const Vec3 x = ca + g.x[i] * da - cb - g.x[j] * db;
                    s += g.w[i] * g.w[j] * std::exp(-norm2(x) * inv);
                }
            acc += s * dot(da, db);
        }
        part[a] = acc;
    });
    double e = 0.0;
    for (double v : part) e += v;
    return norm_c * e;
}

double psi0_closed(const PolygonalLoop& C, double r0, double gamma, double nu, ExponentVariant v) {
    const double k = gamma / nu;
    const double pref = v == ExponentVariant::Linear ? k : k * k;
    return std::exp(-0.5 * pref * loop_heat_energy(C, r0));
}

McEstimate psi0_mc(const PolygonalLoop& C, const GaussianSpec& s, double gamma, double nu, int M, std::uint64_t seed) {
    if (M < 2) throw std::invalid_argument("psi0_mc: need M >= 2");
    const SpectralLattice L = build_lattice(s);
    const std::size_t n = L.k.size();
    // oint e^{i k.x} dx over each edge, exactly
    std::vector<CVec3> T(n);
    for (std::size_t j = 0; j < n; ++j) {
        CVec3 t;
        for (int e = 0; e < C.size(); ++e) {
            const Vec3 a = C.vertex(e), d = edge(C, e);
            const double kd = dot(L.k[j], d);
            const cplx f = std::abs(kd) < 1e-8 ? cplx(1.0, 0.5 * kd) : (std::exp(I * kd) - 1.0) / (I * kd);
            t += (phase(L.k[j], a) * f) * CVec3{d};
        }
        T[j] = t;
    }
    const double kappa = gamma / nu;
    std::vector<cplx> val(static_cast<std::size_t>(M));
    parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) {
        std::vector<CVec3> c;
        draw(L, CounterRng(seed, m), c);
        double circ = 0.0;
        for (std::size_t j = 0; j < n; ++j) circ += 2.0 * std::real(dot(c[j], T[j]));
        val[m] = std::exp(I * (kappa * circ));
    });
    McEstimate r;
    r.samples = M;
    r.seed = seed;
    cplx mean = 0.0;
    for (const cplx& v : val) mean += v;
    mean /= static_cast<double>(M);
    double sr = 0.0, si = 0.0;
    for (const cplx& v : val) {
        sr += std::pow(v.real() - mean.real(), 2);
        si += std::pow(v.imag() - mean.imag(), 2);
    }
    r.mean = mean;
    r.stderr_re = std::sqrt(sr / (M - 1) / M);
    r.stderr_im = std::sqrt(si / (M - 1) / M);
    return r;
}

ArbitrationReport arbitrate_exponent(const PolygonalLoop& C, const GaussianSpec& s, double gamma, double nu, int M,
                                     std::uint64_t seed) {
    ArbitrationReport a;
    a.mc = psi0_mc(C, s, gamma, nu, M, seed);
    a.linear = psi0_closed(C, s.r0, gamma, nu, ExponentVariant::Linear);
    a.squared = psi0_closed(C, s.r0, gamma, nu, ExponentVariant::Squared);
    a.z_linear = (a.mc.mean.real() - a.linear) / a.mc.stderr_re;
    a.z_squared = (a.mc.mean.real() - a.squared) / a.mc.stderr_re;
    a.winner = std::abs(a.z_squared) <= std::abs(a.z_linear) ? ExponentVariant::Squared : ExponentVariant::Linear;
    a.winner_within_3sigma = std::min(std::abs(a.z_linear), std::abs(a.z_squared)) <= 3.0;
    a.imag_within_3sigma = std::abs(a.mc.mean.imag()) <= 3.0 * a.mc.stderr_im;
    return a;
}

std::string covariance_csv(const GaussianSpec& s, const CovarianceReport& r) {
    std::string out = fmt::format("# r0={:.17g} dk={:.17g} k_max={:.17g} seed={} M={}\nquantity,estimate_re,estimate_im,stderr,z,exact,lattice\n",
                                  s.r0, s.lattice_step(), s.cutoff(), r.seed, r.samples);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& w = r.rows[i];
        out += fmt::format("pair{},{:.17g},0,{:.17g},{:.17g},{:.17g},{:.17g}\n", i, w.estimate, w.stderr_, w.z, w.exact,
                           w.lattice);
    }
    return out;
}

}  // namespace looplab

#include "looplab/fields.hpp"

#include "looplab/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace looplab {

WaveMode make_wave_mode(const CVec3& v0, const Vec3& a, double phase) {
    const double na = norm(a);
    if (na == 0.0) throw std::invalid_argument("wave mode: wavevector must be nonzero");
    const double tol = 1e-12 * na * std::max(1.0, norm(v0));
    if (std::fabs(dot(v0.re, a)) > tol || std::fabs(dot(v0.im, a)) > tol)
        throw std::invalid_argument("wave mode: amplitude not orthogonal to wavevector");
    if (!v0.finite() || !a.finite() || !std::isfinite(phase))
        throw std::invalid_argument("wave mode: non-finite component");
    return {v0, a, phase};
}

double TimeLaw::factor(double t) const {
    switch (kind) {
        case Kind::Static: return 1.0;
        case Kind::Linear: return 1.0 + rate * t;
        case Kind::BeltramiDecay: return std::exp(-nu * lambda * lambda * t);
    }
    return 1.0;
}

double TimeLaw::dfactor(double t) const {
    switch (kind) {
        case Kind::Static: return 0.0;
        case Kind::Linear: return rate;
        case Kind::BeltramiDecay: return -nu * lambda * lambda * std::exp(-nu * lambda * lambda * t);
    }
    return 0.0;
}

namespace {

// v0 * exp(i theta) as a complex vector, together with theta's cos/sin.
inline CVec3 mode_value(const WaveMode& m, const Vec3& x) {
    const double th = dot(m.a, x) + m.phase;
    const double c = std::cos(th), s = std::sin(th);
    return {c * m.v0.re - s * m.v0.im, s * m.v0.re + c * m.v0.im};
}

Vec3 spatial_velocity(const AnalyticField& f, const Vec3& x) {
    Vec3 u = f.c0;
    if (f.has_linear) u += f.L * x;
    for (const auto& m : f.modes) u += mode_value(m, x).re;
    return u;
}

}  // namespace

Vec3 eval_velocity(const AnalyticField& f, const Vec3& x, double t) {
    return f.law.factor(t) * spatial_velocity(f, x);
}

Vec3 eval_dt_velocity(const AnalyticField& f, const Vec3& x, double t) {
    return f.law.dfactor(t) * spatial_velocity(f, x);
}

FieldJet eval_jet(const AnalyticField& f, const Vec3& x, double t) {
    FieldJet j;
    j.u = f.c0;
    if (f.has_linear) {
        j.u += f.L * x;
        j.grad = transpose(f.L);
    }
    for (const auto& m : f.modes) {
        const CVec3 z = mode_value(m, x);
        j.u += z.re;
        // d_i Re(v0 e) = Re(i a_i v0 e) = -a_i Im(v0 e)
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) j.grad(i, k) -= m.a[i] * z.im[k];
    }
    const double s = f.law.factor(t);
    j.u *= s;
    j.grad *= s;
    return j;
}

Mat3 eval_grad_velocity(const AnalyticField& f, const Vec3& x, double t) { return eval_jet(f, x, t).grad; }

Tensor3 eval_hessian_velocity(const AnalyticField& f, const Vec3& x, double t) {
    Tensor3 h;
    for (const auto& m : f.modes) {
        const CVec3 z = mode_value(m, x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) h(i, j, k) -= m.a[i] * m.a[j] * z.re[k];
    }
    h *= f.law.factor(t);
    return h;
}

Vec3 eval_vorticity(const AnalyticField& f, const Vec3& x, double t) {
    return curl_of(eval_grad_velocity(f, x, t));
}

Mat3 eval_grad_vorticity(const AnalyticField& f, const Vec3& x, double t) {
    // w = Re(i a x v0 e); d_i w = Re(-a_i (a x v0) e)
    Mat3 g;
    for (const auto& m : f.modes) {
        const CVec3 z = mode_value(m, x);
        const CVec3 axz = {cross(m.a, z.re), cross(m.a, z.im)};
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) g(i, k) -= m.a[i] * axz.re[k];
    }
    g *= f.law.factor(t);
    return g;
}

Vec3 eval_curl_vorticity(const AnalyticField& f, const Vec3& x, double t) {
    return curl_of(eval_grad_vorticity(f, x, t));
}

double eval_divergence(const AnalyticField& f, const Vec3& x, double t) {
    return trace(eval_grad_velocity(f, x, t));
}

Vec3 ns_residual(const AnalyticField& f, const Vec3& x, double t, double nu) {
    if (f.law.is_static()) throw std::invalid_argument("ns_residual: field has no time law");
    const FieldJet j = eval_jet(f, x, t);
    const Vec3 w = curl_of(j.grad);
    return eval_dt_velocity(f, x, t) + nu * eval_curl_vorticity(f, x, t) - cross(j.u, w);
}

void validate_field(const AnalyticField& f) {
    for (const auto& m : f.modes) (void)make_wave_mode(m.v0, m.a, m.phase);
    if (f.has_linear) {
        double scale = frobenius(f.L);
        if (std::fabs(trace(f.L)) > 1e-12 * std::max(1.0, scale))
            throw std::invalid_argument("field: linear part must be traceless");
    }
    if (!f.c0.finite()) throw std::invalid_argument("field: non-finite constant");
    if (f.law.kind == TimeLaw::Kind::BeltramiDecay) {
        if (!(f.law.nu > 0.0)) throw std::invalid_argument("field: beltrami_decay needs nu > 0");
        CounterRng rng(0xBE17A41ULL, 7);
        for (int p = 0; p < 20; ++p) {
            const Vec3 x = rng.uniform_vec(-5.0, 5.0);
            const Vec3 u = eval_velocity(f, x, 0.0);
            const Vec3 w = eval_vorticity(f, x, 0.0);
            const double scale = std::max(1.0, norm(u));
            if (norm(w - f.law.lambda * u) > 1e-10 * scale)
                throw std::invalid_argument("field: beltrami_decay requires curl u = lambda u");
        }
    }
}

AnalyticField constant_field(const Vec3& c0) {
    AnalyticField f;
    f.c0 = c0;
    f.name = "constant";
    return f;
}

AnalyticField rotation_field(TimeLaw law) {
    AnalyticField f;
    f.has_linear = true;
    f.L(0, 1) = -1.0;
    f.L(1, 0) = 1.0;
    f.law = law;
    f.name = "rotation";
    return f;
}

AnalyticField abc_field(double A, double B, double C, TimeLaw law) {
    AnalyticField f;
    // A sin z e1 + A cos z e2
    f.modes.push_back(make_wave_mode({{0, A, 0}, {-A, 0, 0}}, {0, 0, 1}));
    // B sin x e2 + B cos x e3
    f.modes.push_back(make_wave_mode({{0, 0, B}, {0, -B, 0}}, {1, 0, 0}));
    // C cos y e1 + C sin y e3
    f.modes.push_back(make_wave_mode({{C, 0, 0}, {0, 0, -C}}, {0, 1, 0}));
    f.law = law;
    f.name = "abc";
    validate_field(f);
    return f;
}

AnalyticField single_mode_field(const WaveMode& m, TimeLaw law) {
    AnalyticField f;
    f.modes.push_back(m);
    f.law = law;
    f.name = "wave";
    validate_field(f);
    return f;
}

AnalyticField mixed_test_field() {
    AnalyticField f;
    f.modes.push_back(make_wave_mode({{0.0, 0.8, -0.3}, {0.0, 0.2, 0.5}}, {1.1, 0.0, 0.0}, 0.3));
    f.modes.push_back(make_wave_mode({{0.6, 0.0, 0.4}, {-0.2, 0.0, 0.3}}, {0.0, 0.7, 0.0}, -1.2));
    {
        const Vec3 a{0.5, -0.4, 0.9};
        const Vec3 r = cross(a, Vec3{0.3, 1.0, 0.2});
        const Vec3 i = cross(a, Vec3{-0.7, 0.1, 0.4});
        f.modes.push_back(make_wave_mode({0.5 * r, 0.4 * i}, a, 2.0));
    }
    f.has_linear = true;
    f.L(0, 0) = 0.2;  f.L(0, 1) = -0.5; f.L(0, 2) = 0.1;
    f.L(1, 0) = 0.3;  f.L(1, 1) = -0.4; f.L(1, 2) = 0.25;
    f.L(2, 0) = -0.15; f.L(2, 1) = 0.05; f.L(2, 2) = 0.2;
    f.c0 = {0.1, -0.2, 0.05};
    f.name = "mixed";
    validate_field(f);
    return f;
}

double omega_derivative_norm(const AnalyticField& f, const Vec3& x, double t, int K) {
    if (K < 0 || K > 3) throw std::invalid_argument("omega_derivative_norm: K must be in 0..3");
    // D^K w = Re(i^K a^{(x)K} (x) (i a x v0) e)
    int count = 1;
    for (int i = 0; i < K; ++i) count *= 3;
    std::vector<Vec3> acc(count);
    for (const auto& m : f.modes) {
        const CVec3 z = mode_value(m, x);
        CVec3 b = {cross(m.a, z.re), cross(m.a, z.im)};
        b *= cplx(0.0, 1.0);
        cplx ik = 1.0;
        for (int i = 0; i < K; ++i) ik *= cplx(0.0, 1.0);
        const CVec3 base = ik * b;
        for (int idx = 0; idx < count; ++idx) {
            double w = 1.0;
            int r = idx;
            for (int i = 0; i < K; ++i) {
                w *= m.a[r % 3];
                r /= 3;
            }
            acc[idx] += w * base.re;
        }
    }
    if (K == 0 && f.has_linear) acc[0] += curl_of(transpose(f.L));
    double s = 0.0;
    for (const auto& v : acc) s += norm2(v);
    return std::fabs(f.law.factor(t)) * std::sqrt(s);
}

FieldBounds field_bounds(const AnalyticField& f, int K) {
    if (K < 0 || K > 3) throw std::invalid_argument("field_bounds: K must be in 0..3");
    FieldBounds b;
    for (int k = 0; k <= K; ++k) {
        double s = 0.0;
        for (const auto& m : f.modes) s += norm(m.v0) * std::pow(norm(m.a), k + 1);
        b.d_omega[k] = s;
    }
    if (f.has_linear) b.d_omega[0] += norm(curl_of(transpose(f.L)));
    b.u_sup = norm(f.c0);
    b.du_sup = 0.0;
    for (const auto& m : f.modes) {
        b.u_sup += norm(m.v0);
        b.du_sup += norm(m.v0) * norm(m.a);
    }
    if (f.has_linear) {
        b.du_sup += frobenius(f.L);
        if (frobenius(f.L) > 0.0) b.u_sup = std::numeric_limits<double>::infinity();
    }
    return b;
}

}  // namespace looplab

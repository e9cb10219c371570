#pragma once

#include "looplab/vec3.hpp"

#include <array>
#include <string>
#include <vector>

namespace looplab {

// u(x) = Re(v0 exp(i(a.x + phase)))
struct WaveMode {
    CVec3 v0;
    Vec3 a;
    double phase = 0.0;
};

// Throws std::invalid_argument if a = 0 or v0 is not orthogonal to a.
WaveMode make_wave_mode(const CVec3& v0, const Vec3& a, double phase = 0.0);

struct TimeLaw {
    enum class Kind { Static, Linear, BeltramiDecay };
    Kind kind = Kind::Static;
    double rate = 0.0;    // Linear: factor 1 + rate t
    double lambda = 0.0;  // BeltramiDecay: factor exp(-nu lambda^2 t)
    double nu = 0.0;

    static TimeLaw still() { return {}; }
    static TimeLaw linear(double rate) { return {Kind::Linear, rate, 0.0, 0.0}; }
    static TimeLaw beltrami(double lambda, double nu) { return {Kind::BeltramiDecay, 0.0, lambda, nu}; }

    bool is_static() const { return kind == Kind::Static; }
    double factor(double t) const;
    double dfactor(double t) const;
};

struct AnalyticField {
    std::vector<WaveMode> modes;
    bool has_linear = false;
    Mat3 L;  // u_lin = L x, (L x)_i = sum_j L(i,j) x_j
    Vec3 c0;
    TimeLaw law;
    std::string name;
};

// Checks divergence-free modes, traceless L, and the Beltrami property when the
// time law requires it. Throws std::invalid_argument on violation.
void validate_field(const AnalyticField& f);

AnalyticField constant_field(const Vec3& c0);
// u = (-x2, x1, 0), vorticity (0, 0, 2)
AnalyticField rotation_field(TimeLaw law = {});
// u = (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)
AnalyticField abc_field(double A, double B, double C, TimeLaw law = {});
AnalyticField single_mode_field(const WaveMode& m, TimeLaw law = {});
// Generic divergence-free test field: three modes with distinct wavevectors plus a
// traceless linear part.
AnalyticField mixed_test_field();

Vec3 eval_velocity(const AnalyticField& f, const Vec3& x, double t);
Vec3 eval_dt_velocity(const AnalyticField& f, const Vec3& x, double t);
Mat3 eval_grad_velocity(const AnalyticField& f, const Vec3& x, double t);      // (i,j) = d_i u_j
Tensor3 eval_hessian_velocity(const AnalyticField& f, const Vec3& x, double t); // (i,j,m) = d_i d_j u_m
Vec3 eval_vorticity(const AnalyticField& f, const Vec3& x, double t);
Mat3 eval_grad_vorticity(const AnalyticField& f, const Vec3& x, double t);     // (i,m) = d_i w_m
Vec3 eval_curl_vorticity(const AnalyticField& f, const Vec3& x, double t);
double eval_divergence(const AnalyticField& f, const Vec3& x, double t);

// Velocity and gradient in one pass.
struct FieldJet {
    Vec3 u;
    Mat3 grad;
};
FieldJet eval_jet(const AnalyticField& f, const Vec3& x, double t);

// du/dt + nu curl(w) - u x w, the momentum defect with the Bernoulli pressure
// p = -|u|^2/2 that is exact whenever u x w vanishes. Throws for static fields.
Vec3 ns_residual(const AnalyticField& f, const Vec3& x, double t, double nu);

struct FieldBounds {
    std::array<double, 4> d_omega{};  // sup |D^K w|, K = 0..3 (Frobenius norm of the tensor)
    double u_sup = 0.0;               // infinite when a linear part is present
    double du_sup = 0.0;
};
FieldBounds field_bounds(const AnalyticField& f, int K);
// Frobenius norm of the K-th derivative tensor of w at x.
double omega_derivative_norm(const AnalyticField& f, const Vec3& x, double t, int K);

}  // namespace looplab

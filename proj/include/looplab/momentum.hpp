#pragma once

#include "looplab/geometry.hpp"
#include "looplab/loop_operators.hpp"
#include "looplab/vec3.hpp"

#include <functional>
#include <string>
#include <vector>

namespace looplab {

// Momentum variables P_0..P_{N-1}; increments dP_k = P_{k+1} - P_k (cyclic).
struct MomentumState {
    std::vector<CVec3> P;

    int size() const { return static_cast<int>(P.size()); }
    const CVec3& at(long long k) const { return P[cyc(k, size())]; }
    CVec3 dP(long long k) const { return at(k + 1) - at(k); }
    Vec3 dP_real(long long k) const { return dP(k).re; }
    CVec3 mid(long long k) const { return 0.5 * (at(k) + at(k - 1)); }
};

struct MomentumLimits {
    double lambda = 1e3;       // 1/lambda <= |dP_k| <= lambda
    double imag_tol = 1e-12;   // |Im dP_k|
    bool require_p0_zero = true;
};

// Throws std::invalid_argument naming the first violated invariant.
void validate(const MomentumState& s, const MomentumLimits& lim = {});

struct PsiMomentum {
    cplx increments;  // exp{(i g/nu) sum P_k . dC_k}
    cplx vertices;    // exp{-(i g/nu) sum C_k . dP_{k-1}}
    double mismatch;
};

// Throws std::logic_error if the two forms differ by more than 1e-9.
PsiMomentum psi_momentum(const MomentumState& s, const PolygonalLoop& C, double gamma, double nu);

struct ClosedActions {
    CVec3 vorticity;       // Omega_k Psi / Psi
    CVec3 diffusion;       // D_k Psi / Psi
    CVec3 velocity;        // U_k Psi / Psi, including (1 + R)
    CVec3 velocity_bare;   // same with R dropped
    double kappa_arg;      // N^alpha (gamma/nu) |dP_{k-1}|
    double remainder;      // R(kappa_arg)
};

ClosedActions closed_operator_actions(const MomentumState& s, long long k, const OperatorParams& p,
                                      RemainderForm form = RemainderForm::Derived);

enum class EkIndex { KPlus2, KPlus1 };

// Drift term of the momentum system. KPlus2 pairs dP_{k+3} x dP_{k+2}; KPlus1 is the
// alternative dP_{k+3} x dP_{k+1} kept for comparison.
CVec3 e_k(const MomentumState& s, long long k, const OperatorParams& p, EkIndex idx = EkIndex::KPlus2);

// (Omega_{k+3} x U_k - nu D_k) Psi / Psi assembled from closed_operator_actions with R dropped.
CVec3 e_k_composed(const MomentumState& s, long long k, const OperatorParams& p);

CVec3 extended_e_k(const MomentumState& s, long long k, double gamma, double nu, int N);
CVec3 liquid_e_k(const MomentumState& s, long long k, double gamma, double nu);
// The 1/log N part of extended_e_k alone.
CVec3 extended_e_k_linear(const MomentumState& s, long long k, double gamma, int N);

enum class SystemVariant { Drift, Extended, Liquid };
std::string to_string(SystemVariant v);
SystemVariant parse_system_variant(const std::string& s);

struct MomentumTrajectory {
    std::vector<double> t;
    std::vector<MomentumState> states;
    // Optional exact time derivative of P at time t.
    std::function<MomentumState(double)> dPdt;
};

struct ResidualRow {
    double t;
    int k;
    double residual;
};

struct SystemResidual {
    SystemVariant variant;
    std::vector<ResidualRow> rows;
    double max_residual = 0.0;
};

// Residual of dP_k/dt - E_k (Drift, modulo its k-average), d/dt midpoint - E^M_k (Extended)
// or d/dt midpoint - E^l_k (Liquid). Without an exact derivative, five-point central
// differences on a uniform grid are used at interior times.
SystemResidual system_residual(const MomentumTrajectory& traj, SystemVariant v, const OperatorParams& p);

std::string trajectory_csv(const MomentumTrajectory& traj);
std::string residual_csv(const SystemResidual& r, const OperatorParams& p);

}  // namespace looplab

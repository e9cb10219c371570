#pragma once

#include "looplab/biot_savart.hpp"
#include "looplab/circulation.hpp"

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace looplab {

struct OperatorParams {
    double gamma = 1.0;
    double nu = 1.0;
    double alpha = 0.4;
    int N = 16;
    BSConfig ball;  // quadrature orders of the U_k ball integral; ell is taken from alpha and N

    double rho() const { return 1.0 / N; }
    double ell() const;
    double log_inv_rho() const;
    BSConfig ball_config() const;
};

void validate(const OperatorParams& p);

// value = operator action divided by Psi; raw = value * Psi.
struct OperatorResult {
    CVec3 value;
    CVec3 raw;
    cplx psi;
    std::vector<std::pair<std::string, CVec3>> decomposition;

    const CVec3& part(const std::string& name) const;
};

// Directional vertex derivative sum_j w_j grad_{C_j}.
struct VertexDirection {
    std::vector<std::pair<long long, double>> terms;
};
VertexDirection single_vertex(long long k);
// (1/2) grad_{s_k} + (1/2) grad_{s_{k-1}} restricted to the vertex variables C_1..C_{N-1}:
// (1/2) grad_{C_k} + sum_{j=k+1}^{N-1} grad_{C_j}.
VertexDirection extended_direction(int N, long long k);

// Extended operators act on vertices C_1..C_{N-1}; k must be in [1, N-2].
void check_extended_index(const PolygonalLoop& C, long long k);

OperatorResult vorticity_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                            const OperatorParams& p, const QuadratureConfig& q = {});
OperatorResult diffusion_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                            const OperatorParams& p, const QuadratureConfig& q = {});
OperatorResult velocity_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                           const OperatorParams& p, const QuadratureConfig& q = {}, BSDiagnostics* diag = nullptr);
OperatorResult advection_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                            const OperatorParams& p, const QuadratureConfig& q = {});

OperatorResult extended_vorticity_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                                   const OperatorParams& p, const QuadratureConfig& q = {});
OperatorResult extended_diffusion_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                                   const OperatorParams& p, const QuadratureConfig& q = {});

// U^M_k Psi / Psi = base + T . G_rest with G_rest = sum_{j=k+2}^{N-1} grad_{C_j} Gamma.
struct ExtendedVelocity {
    OperatorResult result;
    CVec3 base;
    std::array<CVec3, 3> T;  // column m multiplies G_rest[m]
    Vec3 g_rest;
};
ExtendedVelocity extended_velocity_op(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                                  const OperatorParams& p, const QuadratureConfig& q = {});

// Finite-difference oracles built from psi = loop_functional_sample alone (or, for the
// diffusion operators, from one outer curl of the analytic vorticity action).
CVec3 vorticity_fd(const AnalyticField& f, const PolygonalLoop& C, long long k, double t, const OperatorParams& p,
                   const QuadratureConfig& q = {});
CVec3 extended_vorticity_fd(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                          const OperatorParams& p, const QuadratureConfig& q = {});
CVec3 diffusion_fd(const AnalyticField& f, const PolygonalLoop& C, long long k, double t, const OperatorParams& p,
                   const QuadratureConfig& q = {});
CVec3 extended_diffusion_fd(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                          const OperatorParams& p, const QuadratureConfig& q = {});
// The U_k integrand y -> Omega_k Psi(C_k = y) / Psi(C), analytic and by finite differences of psi.
CVec3 velocity_integrand(const AnalyticField& f, const PolygonalLoop& C, long long k, const Vec3& y, double t,
                         const OperatorParams& p);
CVec3 velocity_integrand_fd(const AnalyticField& f, const PolygonalLoop& C, long long k, const Vec3& y, double t,
                            const OperatorParams& p, const QuadratureConfig& q = {});

// Components l = 0..2 of (i nu/gamma)(Da x Db)(X_m Psi) / Psi for m = 0..2, given the
// analytic symbol S = (i nu/gamma)(Da x Db)Psi / Psi. Derivatives of X are taken by
// central differences of X over perturbed loops.
using LoopVectorFn = std::function<CVec3(const PolygonalLoop&)>;
std::array<CVec3, 3> curl_pair_on_product(const AnalyticField& f, const PolygonalLoop& C, double t,
                                          const OperatorParams& p, const QuadratureConfig& q,
                                          const VertexDirection& Da, const VertexDirection& Db, const CVec3& S,
                                          const LoopVectorFn& X);
// epsilon_{alpha l m} applied to the output of curl_pair_on_product.
CVec3 cross_contract(const std::array<CVec3, 3>& omega_on_X);

struct LoopResidual {
    cplx dt_psi;          // analytic time derivative of Psi
    cplx advection_sum;   // sum_k dC_k . (Omega_{k+3} x U_k) Psi
    cplx diffusion_sum;   // sum_k dC_k . D_k Psi
    cplx r_loop;          // dt Psi + (i gamma/nu)(advection_sum + nu diffusion_sum)
    cplx r_loop_flipped;  // dt Psi - (i gamma/nu)(advection_sum - nu diffusion_sum)
    double worst_ball_change = 0.0;
};
// Requires a time law and C.size() == p.N >= 8.
LoopResidual loop_equation_residual(const AnalyticField& f, const PolygonalLoop& C, double t,
                                    const OperatorParams& p, const QuadratureConfig& q = {});

struct LiquidResidual {
    cplx lhs;              // (dt + i gamma sum_{k=1}^{N-2} dC_k . D^M_k) Psi
    cplx rhs_derived;      // (i gamma/nu) Psi oint (dt u + nu curl w).dC
    cplx rhs_plain;      // Psi oint (dt u + nu curl w).dC
    cplx residual;         // lhs - rhs_derived
    cplx residual_plain; // lhs - rhs_plain
};
LiquidResidual liquid_residual(const AnalyticField& f, const PolygonalLoop& C, double t, const OperatorParams& p,
                               const QuadratureConfig& q = {});

struct RbadReport {
    int N = 0;
    long long k = 0;
    CVec3 result;           // (Omega^M_{k+3} x U^M_k) Psi / Psi
    CVec3 target;           // (w x u)(C_k)
    CVec3 factorized;       // (Omega^M_{k+3} Psi / Psi) x (U^M_k Psi / Psi)
    double total = 0.0;     // |result - target|
    double r_bad = 0.0;     // |result - factorized|, the part the index shift fails to remove
    double r_bad_log = 0.0; // r_bad * log N
};
// Requires 2 <= k <= N-5.
RbadReport rbad_probe(const AnalyticField& f, const PolygonalLoop& C, long long k, double t,
                      const OperatorParams& p, const QuadratureConfig& q = {});

}  // namespace looplab

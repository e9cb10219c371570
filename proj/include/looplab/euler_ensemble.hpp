#pragma once

#include "looplab/momentum.hpp"
#include "looplab/vec3.hpp"

#include <string>
#include <vector>

namespace looplab {

// Star polygon {q/p} with unit edges, lifted by an imaginary offset i A along the normal.
struct StarPolygonEnsemble {
    int q = 0;
    int p = 0;
    Vec3 normal{0, 0, 1};
    double radius = 0.0;
    Vec3 A;
    std::vector<Vec3> f;

    CVec3 G(long long k) const { return {f[cyc(k, q)], A}; }
};

struct ConditionErrors {
    double unit_edges = 0.0;     // max | |f_k - f_{k-1}|^2 - 1 |
    double orthogonal = 0.0;     // max |A.f_k|
    double equal_radii = 0.0;    // max | |f_k|^2 - |f_{k-1}|^2 |
    double hidden = 0.0;         // max | 4|A|^2 - |f_k + f_{k+1}|^2 |
    double max() const;
};

// Throws std::invalid_argument unless q >= 3, 1 <= p < q/2 and gcd(p, q) = 1.
// Throws std::logic_error if a condition fails by more than 1e-12.
StarPolygonEnsemble construct(int q, int p, const Vec3& normal = {0, 0, 1});

ConditionErrors check_conditions(const StarPolygonEnsemble& e);

struct Iabc {
    CVec3 Ia, Ib, Ic;
    cplx FF;       // F.F (non-Hermitian), zero for the ensemble
    double Fnorm;  // |F| (Hermitian), nonzero
};

Iabc verify_Iabc(const StarPolygonEnsemble& e, long long k);

struct EnsembleTrajectory {
    StarPolygonEnsemble ensemble;
    double t0 = 1.0;
    double gamma = 1.0;

    double scale(double t) const;   // (2(t + t0))^{-1/2}
    MomentumState state(double t) const;
    MomentumState rate(double t) const;  // exact dP/dt = -scale^3 G / gamma
};

struct EnsembleResidualRow {
    double t;
    int k;
    double residual;
    double imag_increment;  // |Im dP_k|
};

struct EnsembleResiduals {
    SystemVariant variant;
    std::vector<EnsembleResidualRow> rows;
    double max_residual = 0.0;
    double max_imag_increment = 0.0;
};

// Extended or Liquid variant. Throws std::invalid_argument if some t <= -t0.
EnsembleResiduals trajectory_residuals(const EnsembleTrajectory& tr, SystemVariant v, const std::vector<double>& times);

std::string ensemble_residual_csv(const EnsembleTrajectory& tr, const EnsembleResiduals& r);

// All admissible p for q.
std::vector<int> star_steps(int q);

}  // namespace looplab

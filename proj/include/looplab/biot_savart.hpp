#pragma once

#include "looplab/fields.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace looplab {

// chi(r) = h(2-r) / (h(2-r) + h(r-1)), h(t) = exp(-1/t) for t > 0, else 0.
double cutoff_chi(double r);
double cutoff_chi_d1(double r);
double cutoff_chi_d2(double r);
// Text of the cutoff definition and its FNV-1a hash, recorded in table dumps.
const std::string& cutoff_definition();
std::uint64_t cutoff_definition_hash();

struct BSConfig {
    double ell = 0.25;
    double panel_length = 0.5;  // radial panel length before refinement
    int radial_nodes = 8;       // Gauss nodes per radial panel
    int n_theta = 32;           // Gauss nodes in cos(theta)
    int n_phi = 64;             // uniform nodes in phi
    int max_refine = 0;         // extra refinement passes (each doubles radial and angular orders)
    double refine_tol = 1e-6;
};

void validate(const BSConfig& c);

struct BSDiagnostics {
    int levels_used = 1;
    double last_change = 0.0;  // relative change between the last two levels
    bool converged = true;
    long long evaluations = 0;
};

// Multi-output ball quadrature: F(y, out) fills `outputs` complex vectors; returns
// (1/4pi) int F(y) x grad_y(chi(ell|x-y|)/|x-y|) dy for each output.
std::vector<CVec3> bs_ball(const std::function<void(const Vec3&, CVec3*)>& F, int outputs, const Vec3& x,
                           const BSConfig& cfg, BSDiagnostics* diag = nullptr);

Vec3 bs_direct(const std::function<Vec3(const Vec3&)>& omega, const Vec3& x, const BSConfig& cfg,
               BSDiagnostics* diag = nullptr);
CVec3 bs_direct_complex(const std::function<CVec3(const Vec3&)>& omega, const Vec3& x, const BSConfig& cfg,
                        BSDiagnostics* diag = nullptr);

enum class RemainderForm {
    Derived,  // R(k) = int_1^2 chi'(s) cos(k s) ds, so that BS is exact against direct quadrature
    SingleTerm  // the integration-by-parts formula with a single chi'/r^2 term
};

// Remainder R(kappa) of the closed form on wave modes.
double remainder_R(double kappa, RemainderForm form = RemainderForm::Derived);
// Radial reduction -int_1^2 g(r) r^2 sinc(kappa r) dr with
// g = (chi'' + 2 chi'/r)/r - c chi'/r^2; c = 2 reproduces Derived, c = 1 SingleTerm.
double remainder_R_radial(double kappa, double c);
// R', R'' of the Derived form.
double remainder_R_d1(double kappa);
double remainder_R_d2(double kappa);

// Cached Derived remainder on a uniform grid with quintic Hermite interpolation
// from exact values, first and second derivatives. Beyond kappa_max the direct
// evaluation is used.
class RemainderTable {
public:
    static const RemainderTable& instance();
    RemainderTable(double spacing, double kappa_max);
    double operator()(double kappa) const;
    double spacing() const { return h_; }
    double kappa_max() const { return kmax_; }
    const std::vector<double>& values() const { return r_; }

private:
    double h_, kmax_;
    std::vector<double> r_, r1_, r2_;
};

// i e^{i(a.x+phase)} (a/|a|^2) x v0 (1 + R(|a|/ell))
CVec3 bs_wave_closed(const WaveMode& mode, const Vec3& x, double ell);

// Leray-projected Gaussian packet u = P_H[v0 g(x) e^{i a.x}], g = exp(-|x|^2/(2 width^2)).
struct WindowedMode {
    Vec3 v0{1, 0, 0};
    Vec3 a{0, 0, 0};
    double width = 1.0;
};

struct RecoveryRow {
    double ell = 0.0;
    double error = 0.0;     // |BS_ell[w] - u| in L2 (windowed) or pointwise amplitude (pure wave)
    double relative = 0.0;  // error / |u|
};
struct RecoveryTable {
    std::vector<RecoveryRow> rows;
    double slope = 0.0;
    bool excluded = false;
    std::string note;
};

// L2 error computed through the Fourier multiplier 1 + R(|k|/ell).
RecoveryTable recovery_error(const WindowedMode& m, const std::vector<double>& ells);
// Non-decaying analytic fields: a single wave mode reports the closed-form error
// |R(|a|/ell)| |u|; anything else is flagged and excluded.
RecoveryTable recovery_error(const AnalyticField& f, const std::vector<double>& ells);

// Vorticity of the windowed packet with a = 0: grad g x v0.
Vec3 windowed_vorticity(const WindowedMode& m, const Vec3& x);
// BS_ell of the a = 0 packet at the origin through the Fourier multiplier.
Vec3 windowed_bs_origin(const WindowedMode& m, double ell);

struct PolygrowthRow {
    double ell = 0.0;
    double max_ratio = 0.0;  // max over points of |BS| / (ell^{-m-1} M (1+|x|^m))
    double bound_constant = 0.0;
    bool pass = true;
};
struct PolygrowthReport {
    int m = 0;
    double M = 0.0;
    double C = 0.0;  // fitted at the largest ell
    std::vector<PolygrowthRow> rows;
    bool pass = true;
};
PolygrowthReport polygrowth_check(double M, int m, const std::vector<double>& ells, const BSConfig& base,
                                  int points = 20, std::uint64_t seed = 11);

}  // namespace looplab

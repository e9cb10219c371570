#pragma once

#include "looplab/geometry.hpp"
#include "looplab/vec3.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace looplab {

// Smoothed divergence-free Gaussian field sampled on the cubic Fourier lattice
// dk Z^3 cut at |k| <= k_max. The periodic box has side 2 pi / dk.
struct GaussianSpec {
    double r0 = 1.0;
    double dk = 0.0;        // 0: largest admissible, pi / (4 diameter)
    double k_max = 0.0;     // 0: 6 / r0
    double diameter = 2.0;  // diameter of the region probed (loop or test supports)

    double lattice_step() const;
    double cutoff() const;
    double box() const;
};

void validate(const GaussianSpec& s);

// Half lattice (one of each +-k pair, k = 0 dropped) with per-mode standard deviation.
struct SpectralLattice {
    std::vector<Vec3> k;
    std::vector<double> sigma;  // E|c_k|^2 = sigma^2 per transverse direction
    std::vector<Vec3> e1, e2;   // orthonormal basis of the plane orthogonal to k
};

SpectralLattice build_lattice(const GaussianSpec& s);

struct FieldSample {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<Vec3> k;
    std::vector<CVec3> c;  // xi(x) = sum 2 Re(c_j e^{i k_j.x})

    Vec3 velocity(const Vec3& x) const;
    double divergence(const Vec3& x) const;
};

FieldSample sample_field(const GaussianSpec& s, std::uint64_t seed, std::uint64_t stream = 0);
FieldSample sample_field(const SpectralLattice& L, std::uint64_t seed, std::uint64_t stream = 0);

// Divergence-free test field curl(a phi) with phi = exp(-|x - x0|^2 / (2 s^2)).
struct CurlGaussian {
    Vec3 a;
    Vec3 x0;
    double s = 0.5;

    Vec3 operator()(const Vec3& x) const;
    // int f(x) e^{i k.x} dx
    CVec3 transform(const Vec3& k) const;
};

// <f, e^{r0^2 Laplacian} g> in closed form.
double heat_pairing(const CurlGaussian& f, const CurlGaussian& g, double r0);

struct CovarianceRow {
    double estimate, stderr_, exact, lattice, z;
};

struct CovarianceReport {
    std::vector<CovarianceRow> rows;
    double max_abs_z = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
};

CovarianceReport covariance_check(const GaussianSpec& s, const std::vector<std::pair<CurlGaussian, CurlGaussian>>& pairs,
                                  int M, std::uint64_t seed);

enum class ExponentVariant { Linear, Squared };
std::string to_string(ExponentVariant v);

// oint oint H(C(a) - C(b)) C'(a).C'(b) with the heat kernel of e^{r0^2 Laplacian}.
double loop_heat_energy(const PolygonalLoop& C, double r0, int nodes = 24);

// exp{-(1/2) (gamma/nu)^p E}, p = 1 (Linear) or 2 (Squared).
double psi0_closed(const PolygonalLoop& C, double r0, double gamma, double nu, ExponentVariant v);

struct McEstimate {
    cplx mean;
    double stderr_re = 0.0, stderr_im = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
};

McEstimate psi0_mc(const PolygonalLoop& C, const GaussianSpec& s, double gamma, double nu, int M, std::uint64_t seed);

struct ArbitrationReport {
    McEstimate mc;
    double linear = 0.0, squared = 0.0;
    double z_linear = 0.0, z_squared = 0.0;
    ExponentVariant winner = ExponentVariant::Squared;
    bool winner_within_3sigma = false;
    bool imag_within_3sigma = false;
};

ArbitrationReport arbitrate_exponent(const PolygonalLoop& C, const GaussianSpec& s, double gamma, double nu, int M,
                                     std::uint64_t seed);

std::string covariance_csv(const GaussianSpec& s, const CovarianceReport& r);

}  // namespace looplab

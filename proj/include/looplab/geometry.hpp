#pragma once

#include "looplab/vec3.hpp"

#include <functional>
#include <string>
#include <vector>

namespace looplab {

// Mathematical modulus, result in [0, n).
inline int cyc(long long k, int n) {
    long long r = k % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

class PolygonalLoop {
public:
    PolygonalLoop() = default;
    explicit PolygonalLoop(std::vector<Vec3> vertices);

    int size() const { return static_cast<int>(v_.size()); }
    const Vec3& vertex(long long k) const { return v_[cyc(k, size())]; }
    Vec3& vertex_mut(long long k) { return v_[cyc(k, size())]; }
    const std::vector<Vec3>& vertices() const { return v_; }

    PolygonalLoop translated(const Vec3& h) const;
    PolygonalLoop scaled(double s, const Vec3& about = {}) const;

private:
    std::vector<Vec3> v_;
};

Vec3 edge(const PolygonalLoop& C, long long k);
double arc_length(const PolygonalLoop& C, long long p, long long q);
double perimeter(const PolygonalLoop& C);
// Sum of C_{k+1} x C_k over edges; for a planar loop this is -2 x (vector area).
Vec3 polygon_area_vector(const PolygonalLoop& C);

struct SampledCurve {
    std::function<Vec3(double)> pos;
    std::function<Vec3(double)> deriv;
    int panels = 256;
    int nodes = 4;
    std::string label;
};

SampledCurve circle_curve(const Vec3& center, double radius, const Vec3& normal = {0, 0, 1});
SampledCurve ellipse_curve(const Vec3& center, double a, double b, const Vec3& e1, const Vec3& e2);
// Piecewise-linear closed curve through the given corners, corner j at theta = j/n.
SampledCurve polygon_curve(const std::vector<Vec3>& corners);
SampledCurve constant_curve(const Vec3& p);

Vec3 area_vector(const SampledCurve& g);

struct Discretization {
    PolygonalLoop loop;
    double max_edge = 0.0;
    double M = 0.0;  // smallest M with max edge <= M/N
};
Discretization discretize_curve(const SampledCurve& g, int N);

// Orthonormal pair spanning the plane orthogonal to n.
void plane_basis(const Vec3& n, Vec3& e1, Vec3& e2);

}  // namespace looplab

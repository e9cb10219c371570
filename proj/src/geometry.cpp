#include "looplab/geometry.hpp"

#include "looplab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace looplab {

PolygonalLoop::PolygonalLoop(std::vector<Vec3> vertices) : v_(std::move(vertices)) {
    if (v_.size() < 3) throw std::invalid_argument("PolygonalLoop: need at least 3 vertices");
    for (const auto& p : v_)
        if (!p.finite()) throw std::invalid_argument("PolygonalLoop: non-finite vertex");
}

PolygonalLoop PolygonalLoop::translated(const Vec3& h) const {
    std::vector<Vec3> w = v_;
    for (auto& p : w) p += h;
    return PolygonalLoop(std::move(w));
}

PolygonalLoop PolygonalLoop::scaled(double s, const Vec3& about) const {
    std::vector<Vec3> w = v_;
    for (auto& p : w) p = about + s * (p - about);
    return PolygonalLoop(std::move(w));
}

Vec3 edge(const PolygonalLoop& C, long long k) { return C.vertex(k + 1) - C.vertex(k); }

double arc_length(const PolygonalLoop& C, long long p, long long q) {
    if (p > q) throw std::invalid_argument("arc_length: p > q");
    double s = 0.0;
    for (long long k = p; k <= q; ++k) s += norm(edge(C, k));
    return s;
}

double perimeter(const PolygonalLoop& C) { return arc_length(C, 0, C.size() - 1); }

Vec3 polygon_area_vector(const PolygonalLoop& C) {
    Vec3 s;
    for (int k = 0; k < C.size(); ++k) s += cross(C.vertex(k + 1), C.vertex(k));
    return s;
}

void plane_basis(const Vec3& n, Vec3& e1, Vec3& e2) {
    const Vec3 u = n / norm(n);
    const Vec3 t = std::fabs(u.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    e1 = cross(t, u);
    e1 = e1 / norm(e1);
    e2 = cross(u, e1);
}

SampledCurve circle_curve(const Vec3& center, double radius, const Vec3& normal) {
    Vec3 e1, e2;
    if (normal == Vec3{0, 0, 1}) {
        e1 = {1, 0, 0};
        e2 = {0, 1, 0};
    } else {
        plane_basis(normal, e1, e2);
    }
    return ellipse_curve(center, radius, radius, e1, e2);
}

SampledCurve ellipse_curve(const Vec3& center, double a, double b, const Vec3& e1, const Vec3& e2) {
    SampledCurve g;
    g.pos = [=](double th) {
        const double p = 2 * kPi * th;
        return center + a * std::cos(p) * e1 + b * std::sin(p) * e2;
    };
    g.deriv = [=](double th) {
        const double p = 2 * kPi * th;
        return 2 * kPi * (-a * std::sin(p) * e1 + b * std::cos(p) * e2);
    };
    g.label = "ellipse";
    return g;
}

SampledCurve polygon_curve(const std::vector<Vec3>& corners) {
    if (corners.size() < 3) throw std::invalid_argument("polygon_curve: need at least 3 corners");
    const int n = static_cast<int>(corners.size());
    auto locate = [n](double th, int& j, double& s) {
        double u = th - std::floor(th);
        double x = u * n;
        j = std::min(n - 1, static_cast<int>(std::floor(x)));
        s = x - j;
    };
    SampledCurve g;
    g.pos = [=](double th) {
        int j;
        double s;
        locate(th, j, s);
        return corners[j] + s * (corners[(j + 1) % n] - corners[j]);
    };
    g.deriv = [=](double th) {
        int j;
        double s;
        locate(th, j, s);
        return static_cast<double>(n) * (corners[(j + 1) % n] - corners[j]);
    };
    g.label = "polygon";
    // panel edges on the corners so each side is integrated exactly
    g.panels = n * ((g.panels + n - 1) / n);
    return g;
}

SampledCurve constant_curve(const Vec3& p) {
    SampledCurve g;
    g.pos = [=](double) { return p; };
    g.deriv = [](double) { return Vec3{}; };
    g.label = "constant";
    return g;
}

Vec3 area_vector(const SampledCurve& g) {
    const GaussRule r = composite(0.0, 1.0, g.panels, g.nodes);
    Vec3 s;
    for (int i = 0; i < r.size(); ++i) s += r.w[i] * cross(g.deriv(r.x[i]), g.pos(r.x[i]));
    return s;
}

Discretization discretize_curve(const SampledCurve& g, int N) {
    if (N < 3) throw std::invalid_argument("discretize_curve: N < 3");
    std::vector<Vec3> v(N);
    for (int k = 0; k < N; ++k) v[k] = g.pos(static_cast<double>(k) / N);
    Discretization d{PolygonalLoop(std::move(v)), 0.0, 0.0};
    for (int k = 0; k < N; ++k) d.max_edge = std::max(d.max_edge, norm(edge(d.loop, k)));
    d.M = d.max_edge * N;
    return d;
}

}  // namespace looplab

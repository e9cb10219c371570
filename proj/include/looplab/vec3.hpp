#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace looplab {

using cplx = std::complex<double>;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
constexpr bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

// Complex 3-vector stored as real and imaginary parts.
struct CVec3 {
    Vec3 re, im;

    constexpr CVec3() = default;
    constexpr CVec3(const Vec3& r) : re(r) {}
    constexpr CVec3(const Vec3& r, const Vec3& i) : re(r), im(i) {}

    cplx operator[](int i) const { return {re[i], im[i]}; }
    void set(int i, cplx v) { re[i] = v.real(); im[i] = v.imag(); }

    CVec3& operator+=(const CVec3& o) { re += o.re; im += o.im; return *this; }
    CVec3& operator-=(const CVec3& o) { re -= o.re; im -= o.im; return *this; }
    CVec3& operator*=(cplx s) {
        Vec3 r = s.real() * re - s.imag() * im;
        Vec3 i = s.real() * im + s.imag() * re;
        re = r; im = i;
        return *this;
    }

    bool finite() const { return re.finite() && im.finite(); }
};

inline CVec3 operator+(CVec3 a, const CVec3& b) { return a += b; }
inline CVec3 operator-(CVec3 a, const CVec3& b) { return a -= b; }
inline CVec3 operator-(const CVec3& a) { return {-a.re, -a.im}; }
inline CVec3 operator*(cplx s, CVec3 a) { return a *= s; }
inline CVec3 operator*(CVec3 a, cplx s) { return a *= s; }
inline CVec3 operator*(double s, const CVec3& a) { return {s * a.re, s * a.im}; }
inline CVec3 operator/(const CVec3& a, cplx s) { return (1.0 / s) * a; }
inline bool operator==(const CVec3& a, const CVec3& b) { return a.re == b.re && a.im == b.im; }

// Bilinear dot product: sum of componentwise products, no conjugation.
inline cplx dot(const CVec3& a, const CVec3& b) {
    return {dot(a.re, b.re) - dot(a.im, b.im), dot(a.re, b.im) + dot(a.im, b.re)};
}
// Hermitian inner product conj(a).b
inline cplx hdot(const CVec3& a, const CVec3& b) {
    return {dot(a.re, b.re) + dot(a.im, b.im), dot(a.re, b.im) - dot(a.im, b.re)};
}
inline CVec3 cross(const CVec3& a, const CVec3& b) {
    return {cross(a.re, b.re) - cross(a.im, b.im), cross(a.re, b.im) + cross(a.im, b.re)};
}
inline double norm2(const CVec3& a) { return norm2(a.re) + norm2(a.im); }
inline double norm(const CVec3& a) { return std::sqrt(norm2(a)); }
inline CVec3 conj(const CVec3& a) { return {a.re, -a.im}; }

// Row i holds d/dx_i, column j the component: m(i,j) = d_i u_j.
struct Mat3 {
    std::array<double, 9> a{};
    constexpr double operator()(int i, int j) const { return a[3 * i + j]; }
    constexpr double& operator()(int i, int j) { return a[3 * i + j]; }
    Mat3& operator+=(const Mat3& o) { for (int i = 0; i < 9; ++i) a[i] += o.a[i]; return *this; }
    Mat3& operator*=(double s) { for (auto& v : a) v *= s; return *this; }
};
inline Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
inline Mat3 operator-(Mat3 a, const Mat3& b) { for (int i = 0; i < 9; ++i) a.a[i] -= b.a[i]; return a; }
inline Mat3 operator*(double s, Mat3 a) { return a *= s; }
// (m v)_i = sum_j m(i,j) v_j
inline Vec3 operator*(const Mat3& m, const Vec3& v) {
    return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
            m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
            m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}
inline Mat3 transpose(const Mat3& m) {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t(i, j) = m(j, i);
    return t;
}
inline double trace(const Mat3& m) { return m(0, 0) + m(1, 1) + m(2, 2); }
inline double frobenius(const Mat3& m) {
    double s = 0;
    for (double v : m.a) s += v * v;
    return std::sqrt(s);
}
// curl from a gradient matrix g(i,j) = d_i u_j
inline Vec3 curl_of(const Mat3& g) {
    return {g(1, 2) - g(2, 1), g(2, 0) - g(0, 2), g(0, 1) - g(1, 0)};
}

// h(i,j,m) = d_i d_j u_m
struct Tensor3 {
    std::array<double, 27> a{};
    constexpr double operator()(int i, int j, int m) const { return a[9 * i + 3 * j + m]; }
    constexpr double& operator()(int i, int j, int m) { return a[9 * i + 3 * j + m]; }
    Tensor3& operator+=(const Tensor3& o) { for (int i = 0; i < 27; ++i) a[i] += o.a[i]; return *this; }
    Tensor3& operator*=(double s) { for (auto& v : a) v *= s; return *this; }
};
// contraction over the last index: (h . d)(i,j) = sum_m h(i,j,m) d_m
inline Mat3 contract_last(const Tensor3& h, const Vec3& d) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = h(i, j, 0) * d.x + h(i, j, 1) * d.y + h(i, j, 2) * d.z;
    return r;
}

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace looplab

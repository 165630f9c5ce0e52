#pragma once

#include <array>
#include <cmath>

namespace peterlin {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

/// General 2x2 matrix, row-major; (i,j) entry is a[i][j].
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    double trace() const { return a11 + a22; }
    Vec2 row(int i) const { return i == 0 ? Vec2{a11, a12} : Vec2{a21, a22}; }
    Vec2 apply(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
    Mat2 operator+(const Mat2& o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
    Mat2 operator-(const Mat2& o) const { return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22}; }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    double frobenius() const { return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22); }
};

/// Symmetric 2x2 tensor stored as (t11, t12, t22); t21 == t12 by construction.
struct SymMat2 {
    double t11 = 0.0, t12 = 0.0, t22 = 0.0;

    double trace() const { return t11 + t22; }
    double det() const { return t11 * t22 - t12 * t12; }
    Mat2 full() const { return {t11, t12, t12, t22}; }
    Vec2 apply(Vec2 v) const { return {t11 * v.x + t12 * v.y, t12 * v.x + t22 * v.y}; }
    SymMat2 operator+(const SymMat2& o) const { return {t11 + o.t11, t12 + o.t12, t22 + o.t22}; }
    SymMat2 operator-(const SymMat2& o) const { return {t11 - o.t11, t12 - o.t12, t22 - o.t22}; }
    SymMat2 operator*(double s) const { return {t11 * s, t12 * s, t22 * s}; }
    double frobenius() const { return std::sqrt(t11 * t11 + 2.0 * t12 * t12 + t22 * t22); }

    double comp(int k) const { return k == 0 ? t11 : (k == 1 ? t12 : t22); }
};

inline SymMat2 identity_sym() { return {1.0, 0.0, 1.0}; }

/// A : B over all four entries.
inline double ddot(const Mat2& a, const Mat2& b) {
    return a.a11 * b.a11 + a.a12 * b.a12 + a.a21 * b.a21 + a.a22 * b.a22;
}

inline double ddot(const SymMat2& a, const SymMat2& b) {
    return a.t11 * b.t11 + 2.0 * a.t12 * b.t12 + a.t22 * b.t22;
}

/// Pairing of a general matrix against the symmetric component basis:
/// component k of the vector v with (A, D) = sum_k v_k D_k for D symmetric
/// stored as (d11, d12, d22).
inline std::array<double, 3> sym_pairing(const Mat2& a) {
    return {a.a11, a.a12 + a.a21, a.a22};
}

inline std::array<double, 3> sym_pairing(const SymMat2& a) {
    return {a.t11, 2.0 * a.t12, a.t22};
}

/// M * S with S symmetric; result is general.
inline Mat2 mul(const Mat2& m, const SymMat2& s) {
    return {m.a11 * s.t11 + m.a12 * s.t12, m.a11 * s.t12 + m.a12 * s.t22,
            m.a21 * s.t11 + m.a22 * s.t12, m.a21 * s.t12 + m.a22 * s.t22};
}

}  // namespace peterlin

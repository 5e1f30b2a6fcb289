#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace hexcube {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    constexpr bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline constexpr double norm2(const Vec3& v) { return dot(v, v); }
inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    return n > 0.0 ? v / n : Vec3{0, 0, 0};
}
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

// Scalar triple product det[a b c].
inline constexpr double triple(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * norm(cross(b - a, c - a));
}

// Angle at vertex a of triangle (a, b, c), in radians.
inline double corner_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 u = b - a, v = c - a;
    double cr = norm(cross(u, v));
    double d = dot(u, v);
    return std::atan2(cr, d);
}

// cot of the angle at vertex a of triangle (a, b, c).
inline double corner_cotangent(const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 u = b - a, v = c - a;
    double cr = norm(cross(u, v));
    double d = dot(u, v);
    if (cr == 0.0) return std::numeric_limits<double>::infinity();
    return d / cr;
}

struct BBox {
    Vec3 min{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
             std::numeric_limits<double>::max()};
    Vec3 max{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
             std::numeric_limits<double>::lowest()};

    void expand(const Vec3& p) {
        for (int i = 0; i < 3; ++i) {
            if (p[i] < min[i]) min[i] = p[i];
            if (p[i] > max[i]) max[i] = p[i];
        }
    }
    Vec3 extent() const { return max - min; }
    Vec3 center() const { return (min + max) * 0.5; }
    double diagonal() const { return norm(extent()); }
    double max_extent() const {
        Vec3 e = extent();
        return std::max(e.x, std::max(e.y, e.z));
    }
    double min_extent() const {
        Vec3 e = extent();
        return std::min(e.x, std::min(e.y, e.z));
    }
};

// Signed solid angle of the spherical triangle with vertices a, b, c on the
// unit sphere (Van Oosterom & Strackee).  Positive for counterclockwise
// orientation seen from outside.  Equals the signed geodesic triangle area.
inline double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    double num = triple(a, b, c);
    double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    return 2.0 * std::atan2(num, den);
}

}  // namespace hexcube

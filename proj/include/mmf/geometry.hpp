#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mmf {

// Point in value space, dimension 1..3. Unused trailing coords stay zero so
// arithmetic can ignore the dimension.
struct Vec {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    int n = 0;

    Vec() = default;
    Vec(double x, double y) : c{x, y, 0.0}, n(2) {}
    Vec(double x, double y, double z) : c{x, y, z}, n(3) {}
    static Vec scalar(double x) {
        Vec v;
        v.c[0] = x;
        v.n = 1;
        return v;
    }
    static Vec zero(int dim) {
        Vec v;
        v.n = dim;
        return v;
    }

    double& operator[](int i) { return c[i]; }
    double operator[](int i) const { return c[i]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < 3; ++i) c[i] += o.c[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < 3; ++i) c[i] -= o.c[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < 3; ++i) c[i] *= s;
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator*(Vec a, double s) { return a *= s; }

    double dot(const Vec& o) const { return c[0] * o.c[0] + c[1] * o.c[1] + c[2] * o.c[2]; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

inline double cross2(const Vec& a, const Vec& b) { return a.c[0] * b.c[1] - a.c[1] * b.c[0]; }

inline Vec cross3(const Vec& a, const Vec& b) {
    return Vec(a.c[1] * b.c[2] - a.c[2] * b.c[1],
               a.c[2] * b.c[0] - a.c[0] * b.c[2],
               a.c[0] * b.c[1] - a.c[1] * b.c[0]);
}

inline double det3(const Vec& a, const Vec& b, const Vec& c) { return a.dot(cross3(b, c)); }

struct PointCloud {
    std::vector<Vec> pts;
    int dim = 0;

    std::size_t size() const { return pts.size(); }
    bool empty() const { return pts.empty(); }

    // Bounding-box diagonal; the scale reference for floors and tolerances.
    double diameter() const {
        if (pts.empty()) return 0.0;
        double lo[3], hi[3];
        for (int k = 0; k < 3; ++k) {
            lo[k] = pts[0].c[k];
            hi[k] = pts[0].c[k];
        }
        for (const Vec& p : pts)
            for (int k = 0; k < 3; ++k) {
                if (p.c[k] < lo[k]) lo[k] = p.c[k];
                if (p.c[k] > hi[k]) hi[k] = p.c[k];
            }
        double d2 = 0.0;
        for (int k = 0; k < 3; ++k) d2 += (hi[k] - lo[k]) * (hi[k] - lo[k]);
        return std::sqrt(d2);
    }
};

}  // namespace mmf

#pragma once

// Self-contained reference computations used to cross-check the library.
// Everything here is implemented independently of the production code paths:
// volumes come from Cayley-Menger determinants (the library uses Gram/SVD),
// areas from the shoelace formula, fatness from brute-force face enumeration
// over these oracles, and 2D overlap areas from Sutherland-Hodgman clipping.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fatmesh/complex.hpp"
#include "fatmesh/geometry.hpp"

namespace oracles {

using fatmesh::Vec;
using fatmesh::SimplexPoints;

inline double factorial(int k) {
    double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// k-volume of a simplex from squared distances only.
inline double cayley_menger_volume(const SimplexPoints& pts) {
    const int m = static_cast<int>(pts.size());
    const int k = m - 1;
    if (k == 0) return 1.0;  // dimension-0 convention
    Eigen::MatrixXd b(m + 1, m + 1);
    b.setZero();
    for (int i = 1; i <= m; ++i) {
        b(0, i) = 1;
        b(i, 0) = 1;
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) b(i + 1, j + 1) = (pts[i] - pts[j]).squaredNorm();
    const double det = b.determinant();
    const double sign = (k + 1) % 2 == 0 ? 1.0 : -1.0;
    const double v2 = sign * det / (std::pow(2.0, k) * factorial(k) * factorial(k));
    return v2 <= 0 ? 0.0 : std::sqrt(v2);
}

inline double diameter(const SimplexPoints& pts) {
    double d = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

// Brute-force fatness: minimum of vol/diam^dim over every vertex subset.
inline double brute_force_fatness(const SimplexPoints& pts) {
    const int m = static_cast<int>(pts.size());
    double phi = 1.0;  // 0-dimensional faces contribute 1
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        SimplexPoints face;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) face.push_back(pts[i]);
        const int k = static_cast<int>(face.size()) - 1;
        if (k == 0) continue;
        const double vol = cayley_menger_volume(face);
        const double diam = diameter(face);
        phi = std::min(phi, vol / std::pow(diam, k));
    }
    return phi;
}

// Signed area of a 2D polygon (counter-clockwise positive).
inline double shoelace_area(const std::vector<Vec>& poly) {
    double a = 0;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec& p = poly[i];
        const Vec& q = poly[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return a / 2;
}

// Sutherland-Hodgman: clip a convex polygon by the half-plane left of a->b.
inline std::vector<Vec> clip_halfplane(const std::vector<Vec>& poly, const Vec& a, const Vec& b) {
    auto side = [&](const Vec& p) {
        return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    };
    std::vector<Vec> out;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec& p = poly[i];
        const Vec& q = poly[(i + 1) % n];
        const double sp = side(p), sq = side(q);
        if (sp >= 0) out.push_back(p);
        if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) {
            const double t = sp / (sp - sq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

// Area of the intersection of two convex 2D polygons (vertices in CCW order).
inline double convex_overlap_area(std::vector<Vec> subject, const std::vector<Vec>& clip) {
    if (shoelace_area(subject) < 0) std::reverse(subject.begin(), subject.end());
    std::vector<Vec> c = clip;
    if (shoelace_area(c) < 0) std::reverse(c.begin(), c.end());
    std::vector<Vec> poly = subject;
    for (size_t i = 0; i < c.size() && !poly.empty(); ++i)
        poly = clip_halfplane(poly, c[i], c[(i + 1) % c.size()]);
    return poly.empty() ? 0.0 : std::abs(shoelace_area(poly));
}

// Haar-ish random rotation from the QR factorization of a Gaussian matrix.
inline Eigen::MatrixXd random_rotation(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1;
    return q;
}

inline Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

inline Vec vec3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

inline Vec vec4(double x, double y, double z, double w) {
    Vec v(4);
    v << x, y, z, w;
    return v;
}

// Vertices of a regular tetrahedron with unit edge length.
inline SimplexPoints regular_tetrahedron() {
    SimplexPoints pts;
    pts.push_back(vec3(0, 0, 0));
    pts.push_back(vec3(1, 0, 0));
    pts.push_back(vec3(0.5, std::sqrt(3.0) / 2, 0));
    pts.push_back(vec3(0.5, std::sqrt(3.0) / 6, std::sqrt(2.0 / 3.0)));
    return pts;
}

inline SimplexPoints equilateral_triangle() {
    SimplexPoints pts;
    pts.push_back(vec2(0, 0));
    pts.push_back(vec2(1, 0));
    pts.push_back(vec2(0.5, std::sqrt(3.0) / 2));
    return pts;
}

// Regular icosahedron surface (12 vertices, 20 triangles): the faces are
// exactly the triples of vertices at the minimal mutual distance.
inline fatmesh::Complex icosahedron_surface() {
    const double g = (1.0 + std::sqrt(5.0)) / 2.0;
    fatmesh::Complex c;
    c.ambient = 3;
    for (double s1 : {-1.0, 1.0})
        for (double s2 : {-1.0, 1.0}) {
            c.add_vertex(vec3(0, s1, s2 * g));
            c.add_vertex(vec3(s1, s2 * g, 0));
            c.add_vertex(vec3(s1 * g, 0, s2));
        }
    const int n = static_cast<int>(c.verts.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const double a = (c.verts[i] - c.verts[j]).norm();
                const double b = (c.verts[j] - c.verts[k]).norm();
                const double d = (c.verts[i] - c.verts[k]).norm();
                if (std::abs(a - 2) < 1e-9 && std::abs(b - 2) < 1e-9 && std::abs(d - 2) < 1e-9)
                    c.add_top({i, j, k});
            }
    return c;
}

}  // namespace oracles

#include "fatmesh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fatmesh {

double fatness(const SimplexPoints& pts) {
    if (pts.empty()) throw std::invalid_argument("fatness: empty point list");
    if (pts.size() > 1 && !is_nondegenerate_simplex(pts, kDefaultTol)) return 0.0;
    const int m = static_cast<int>(pts.size());
    double phi = 1.0;  // every 0-face contributes vol/diam^0 = 1
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        SimplexPoints face;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) face.push_back(pts[i]);
        const int k = static_cast<int>(face.size()) - 1;
        if (k == 0) continue;
        const double diam = simplex_diameter(face);
        if (diam == 0) return 0.0;
        phi = std::min(phi, simplex_volume(face) / std::pow(diam, k));
    }
    return phi;
}

double fatness(const Simplex& s, const Complex& c) { return fatness(c.points_of(s)); }

FatnessReport complex_fatness(const Complex& c) {
    FatnessReport report;
    for (const Simplex& t : c.tops) {
        const double phi = fatness(t, c);
        report.per_simplex[t.v] = phi;
        if (std::isnan(report.complex_min) || phi < report.complex_min) {
            report.complex_min = phi;
            report.argmin = t.v;
        }
        int bucket = static_cast<int>(phi * kFatnessHistogramBuckets);
        bucket = std::clamp(bucket, 0, kFatnessHistogramBuckets - 1);
        ++report.histogram[bucket];
    }
    return report;
}

namespace {

// Solid angle at the apex spanned by three edge vectors (van Oosterom &
// Strackee's atan2 form, numerically stable for thin cones).
double solid_angle(const Vec& a, const Vec& b, const Vec& c) {
    Mat m(a.size(), 3);
    m.col(0) = a;
    m.col(1) = b;
    m.col(2) = c;
    // |det [a b c]| computed via the Gram determinant so any ambient works
    const double num = std::sqrt(std::max(0.0, (m.transpose() * m).determinant()));
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    double omega = 2.0 * std::atan2(num, den);
    if (omega < 0) omega += 4.0 * M_PI;
    return omega;
}

}  // namespace

AngleReport dihedral_angles(const SimplexPoints& pts) {
    const int k = static_cast<int>(pts.size()) - 1;
    if (k < 1) throw std::invalid_argument("dihedral_angles: need a simplex of dimension >= 1");
    if (!is_nondegenerate_simplex(pts, kDefaultTol))
        throw std::invalid_argument("dihedral_angles: degenerate simplex");

    AngleReport report;
    FaceKey whole;
    for (int i = 0; i <= k; ++i) whole.push_back(i);

    for (unsigned mask = 1; mask + 1 < (1u << (k + 1)); ++mask) {
        FaceKey face;
        std::vector<int> rest;
        for (int i = 0; i <= k; ++i)
            (mask & (1u << i) ? face : rest).push_back(i);
        const int codim = static_cast<int>(rest.size());

        if (codim == 1) {
            report.per_face[{whole, face}] = M_PI;  // a facet is flat inside the hull
            continue;
        }
        if (codim == 2) {
            // Angle between the two facets meeting at `face`, measured in the
            // complement of the face's affine hull.
            SimplexPoints fpts;
            for (int i : face) fpts.push_back(pts[i]);
            const Vec& o = fpts[0];
            Vec u = pts[rest[0]] - o;
            Vec v = pts[rest[1]] - o;
            if (fpts.size() > 1) {
                AffineHull h = affine_hull(fpts, kDefaultTol);
                u -= h.basis * (h.basis.transpose() * u);
                v -= h.basis * (h.basis.transpose() * v);
            }
            const double cosang = u.dot(v) / (u.norm() * v.norm());
            const double angle = std::acos(std::clamp(cosang, -1.0, 1.0));
            report.per_face[{whole, face}] = angle;
            if (std::isnan(report.min_dihedral) || angle < report.min_dihedral)
                report.min_dihedral = angle;
            continue;
        }
        if (k == 3 && face.size() == 1) {
            const Vec& o = pts[face[0]];
            report.per_face[{whole, face}] =
                solid_angle(pts[rest[0]] - o, pts[rest[1]] - o, pts[rest[2]] - o);
        }
        // Higher-codimension normalized angles beyond the tetrahedron case
        // are not part of the report.
    }
    return report;
}

AngleReport dihedral_angles(const Simplex& s, const Complex& c) {
    AngleReport local = dihedral_angles(c.points_of(s));
    AngleReport out;
    out.min_dihedral = local.min_dihedral;
    for (const auto& [key, angle] : local.per_face) {
        FaceKey face;
        for (int i : key.second) face.push_back(s.v[i]);
        out.per_face[{s.v, face}] = angle;
    }
    return out;
}

double min_dihedral_angle(const Complex& c) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const Simplex& t : c.tops) {
        if (t.dim() < 2) continue;  // no codimension-2 face to measure
        const double a = dihedral_angles(t, c).min_dihedral;
        if (std::isnan(best) || a < best) best = a;
    }
    return best;
}

}  // namespace fatmesh

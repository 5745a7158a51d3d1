#pragma once

#include <array>
#include <limits>
#include <map>
#include <utility>

#include "fatmesh/complex.hpp"
#include "fatmesh/geometry.hpp"

namespace fatmesh {

// Fatness of a simplex: the minimum of vol(f) / diam(f)^dim(f) over every
// face f (the simplex itself included). 0-dimensional faces contribute 1, so
// the value lies in [0,1]; degenerate simplices score 0.
double fatness(const SimplexPoints& pts);
double fatness(const Simplex& s, const Complex& c);

inline constexpr int kFatnessHistogramBuckets = 20;  // uniform over [0,1]

struct FatnessReport {
    std::map<FaceKey, double> per_simplex;  // top simplex -> fatness
    double complex_min = std::numeric_limits<double>::quiet_NaN();  // NaN when empty
    FaceKey argmin;
    std::array<int, kFatnessHistogramBuckets> histogram{};

    bool empty() const { return per_simplex.empty(); }
};

// Fatness of every top simplex of c; complex_min is realized by argmin.
FatnessReport complex_fatness(const Complex& c);

// Internal angles of one simplex at its proper faces. Codimension-2 faces
// carry the classical dihedral angle (the angle between the two incident
// facets measured inside the simplex's affine hull); codimension-1 faces are
// flat (pi); vertices of 3-dimensional simplices additionally get their solid
// angle. min_dihedral ranges over the codimension-2 entries only, so it is
// always a planar angle in (0, pi).
struct AngleReport {
    double min_dihedral = std::numeric_limits<double>::quiet_NaN();
    std::map<std::pair<FaceKey, FaceKey>, double> per_face;  // (simplex, face) -> angle
};

AngleReport dihedral_angles(const SimplexPoints& pts);
AngleReport dihedral_angles(const Simplex& s, const Complex& c);

// Smallest codimension-2 dihedral angle over all top simplices of c.
double min_dihedral_angle(const Complex& c);

}  // namespace fatmesh

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fatmesh/geometry.hpp"

namespace fatmesh {

// Convex polytope (typically the intersection of two simplices) carrying its
// vertex set, intrinsic affine hull, facet half-spaces, and the full face
// lattice. Vertices are the extreme points, stored in lexicographic
// coordinate order so identical point sets always yield identical cells.
struct ConvexCell {
    std::vector<Vec> verts;
    AffineHull hull;  // intrinsic affine hull of the vertex set
    int dim = 0;      // intrinsic dimension

    // faces_by_dim[d] lists every d-face as a sorted vertex-index set;
    // faces_by_dim[dim] is the single improper face (the cell itself).
    std::vector<std::vector<std::vector<int>>> faces_by_dim;

    // Facet half-spaces in hull coordinates: g.y <= b with |g| = 1.
    std::vector<std::pair<Vec, double>> rows;

    const std::vector<std::vector<int>>& faces(int d) const { return faces_by_dim.at(d); }
    SimplexPoints points(const std::vector<int>& face) const;
    bool contains(const Vec& x, double tol = kDefaultTol) const;
};

// Build a cell from its extreme points (duplicates within tol are merged).
// Facets are discovered by scanning supporting hyperplanes; the face lattice
// is their meet-closure.
ConvexCell cell_from_points(std::vector<Vec> pts, double tol = kDefaultTol);

// Convex intersection of two simplices in a common ambient space, or nullopt
// when they are disjoint. For delta-transverse inputs of dimensions k1, k2 in
// ambient m the result has dimension max(0, k1+k2-m).
std::optional<ConvexCell> intersect_simplices(const SimplexPoints& a, const SimplexPoints& b,
                                              double tol = kDefaultTol);

// Deepest interior point of the cell within its own affine hull and its
// distance to the relative boundary (the inscribed-ball linear program,
// solved by enumerating basic solutions with a lexicographic tie-break).
// Cells of dimension 0 are an input error.
std::pair<Vec, double> chebyshev_point(const ConvexCell& cell);

// Subdivide the cell into simplices, inductively over the face lattice:
// faces that already are simplices stay whole; every other face is coned
// from its Chebyshev point over its subdivided boundary. Piece volumes sum
// to the cell volume.
std::vector<SimplexPoints> subdivide_cell_fat(const ConvexCell& cell);

// Cell volume via a deterministic fan triangulation from the lowest vertex.
double cell_volume(const ConvexCell& cell);

// Cut the cell by the ambient half-space {x : n.x <= c}. Returns nullopt when
// nothing (above tolerance) remains.
std::optional<ConvexCell> clip_cell(const ConvexCell& cell, const Vec& n, double c,
                                    double tol = kDefaultTol);

}  // namespace fatmesh

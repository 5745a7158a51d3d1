#pragma once

// Low-level geometric kernel: simplex volumes, diameters, affine hulls,
// distances between simplices, angles between affine subspaces, and the
// deterministic sampling helpers used by the randomized routines.
//
// Conventions used throughout the library:
//  * a k-simplex is handed around as a list of k+1 points in R^N (N >= k);
//  * volumes are intrinsic k-volumes (length, area, ...), not ambient ones;
//  * a 0-simplex has volume 1 so that vertex faces never dominate a
//    fatness minimum;
//  * tolerances are absolute and live in the units of the input mesh.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace fatmesh {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Points of one simplex (size = dim + 1).
using SimplexPoints = std::vector<Vec>;

constexpr double kDefaultTol = 1e-9;

double factorial(int k);

// ---------------------------------------------------------------------------
// Bounding boxes (used to prune pairwise work).

struct Bbox {
    Vec lo, hi;

    static Bbox of(const SimplexPoints& pts);
    bool intersects(const Bbox& other, double slack) const;
    // Lower bound for the distance between the two boxed sets.
    double distance(const Bbox& other) const;
    double diag() const { return (hi - lo).norm(); }
};

// ---------------------------------------------------------------------------
// Volume / diameter / rank.

// Edge matrix with columns p_i - p_0, i = 1..k.
Mat edge_matrix(const SimplexPoints& pts);

// Intrinsic k-volume via the singular values of the edge matrix
// (sqrt(det(E^T E)) / k!). Returns 1 for a single point.
double simplex_volume(const SimplexPoints& pts);

// Largest pairwise vertex distance; 0 for a single point.
double simplex_diameter(const SimplexPoints& pts);

// Rank of the direction space with an absolute singular-value cutoff.
int affine_rank(const SimplexPoints& pts, double tol);

// True when the k+1 points genuinely span a k-dimensional hull.
bool is_nondegenerate_simplex(const SimplexPoints& pts, double tol);

// ---------------------------------------------------------------------------
// Affine hulls.

struct AffineHull {
    Vec origin;   // a point on the hull
    Mat basis;    // ambient x dim, orthonormal columns
    int dim = 0;
};

AffineHull affine_hull(const SimplexPoints& pts, double tol);

// Hull coordinates of x (least squares onto the hull).
Vec to_hull_coords(const AffineHull& h, const Vec& x);
Vec from_hull_coords(const AffineHull& h, const Vec& y);
// Distance from x to the hull.
double hull_distance(const AffineHull& h, const Vec& x);

// Intersection of two affine hulls as a new hull; nullopt when the hulls
// miss each other by more than tol.
std::optional<AffineHull> intersect_hulls(const AffineHull& a, const AffineHull& b, double tol);

// ---------------------------------------------------------------------------
// Barycentric coordinates and point membership.

// Barycentric coordinates of x with respect to a non-degenerate simplex
// (least squares in the hull; the residual distance is reported separately).
struct Barycentric {
    Eigen::VectorXd lambda;  // size k+1, sums to 1
    double hull_residual;    // distance from x to the affine hull
};
Barycentric barycentric_coordinates(const SimplexPoints& pts, const Vec& x);

// x lies in the closed simplex up to tol (both membrane and hull residual).
bool point_in_simplex(const SimplexPoints& pts, const Vec& x, double tol);

// ---------------------------------------------------------------------------
// Distances.

// Euclidean distance between the closed convex hulls of two point sets of
// simplex shape, via critical points on face pairs. Exact up to roundoff for
// non-degenerate data; robust for the small dimensions used here.
double simplex_distance(const SimplexPoints& a, const SimplexPoints& b);

// Distance from a single point to a simplex.
double point_simplex_distance(const Vec& x, const SimplexPoints& s);

// All face-pair distances of two simplices: result[ma][mb] is the distance
// between the faces selected by vertex bitmasks ma, mb (bit i = vertex i).
// Masks run over 1..2^(k+1)-1. Used by the transversality predicate, which
// needs every face pair anyway; computing them in one sweep shares the
// per-pair critical-point solves.
std::vector<std::vector<double>> face_pair_distances(const SimplexPoints& a,
                                                     const SimplexPoints& b);

// ---------------------------------------------------------------------------
// Angles.

// Angle between the direction spaces of two affine hulls after removing
// their common subspace: the smallest principal angle between the reduced
// spaces, in (0, pi/2]. Returns 0 when one direction space is contained in
// the other (the degenerate, non-transverse configuration).
double hull_angle(const SimplexPoints& a, const SimplexPoints& b, double tol);

// ---------------------------------------------------------------------------
// Deterministic sampling.

// Uniform point in the unit ball of dimension d (Box-Muller + radius).
Vec sample_unit_ball(std::mt19937_64& rng, int d);

// Unit direction.
Vec sample_unit_sphere(std::mt19937_64& rng, int d);

// Halton sequence (index >= 0) in [0,1)^d, bases 2,3,5,7,...
Vec halton_point(int index, int d);

// Deterministic barycentric sample: Halton point folded onto the standard
// simplex (exponential spacings normalized).
Eigen::VectorXd halton_barycentric(int index, int nverts);

// FNV-1a hash of a byte string; used to version calibration tables.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace fatmesh

#pragma once

// Exact rational fallback for incidence predicates. Doubles convert to
// rationals exactly, so "is the intersection of these two simplices exactly
// their shared face?" can be decided with no tolerance at all. The floating
// path answers the easy cases; this path settles the near-degenerate ones.

#include "fatmesh/geometry.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace fatmesh {

using Rat = boost::multiprecision::cpp_rational;
using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;  // row major

RatVec to_rational(const Vec& v);

// Reduced row echelon elimination; returns rank. Operates on [A | B] given
// as one augmented matrix.
int rref(RatMat& m);

// Solve A x = b exactly. Returns {has_solution, particular x, nullspace basis}.
struct RatSolve {
    bool consistent = false;
    RatVec particular;          // one solution (free vars = 0)
    std::vector<RatVec> nullspace;
};
RatSolve solve_exact(const RatMat& a, const RatVec& b);

// Exact check that |A| formed by ptsA and |B| formed by ptsB intersect in
// exactly the face spanned by the listed shared vertex positions
// (sharedA[i] in A matches sharedB[i] in B; coordinates must be identical).
// Both simplices must be non-degenerate. Returns true when
// |A| /\ |B| == conv(shared vertices) (the empty set when none are shared).
bool exact_intersection_is_shared_face(const SimplexPoints& ptsA,
                                       const SimplexPoints& ptsB,
                                       const std::vector<int>& sharedA,
                                       const std::vector<int>& sharedB);

}  // namespace fatmesh

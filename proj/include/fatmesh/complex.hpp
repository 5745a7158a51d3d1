#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "fatmesh/geometry.hpp"

namespace fatmesh {

// A simplex is identified by its sorted vertex-id list; the geometry lives in
// the owning Complex's vertex table.
struct Simplex {
    std::vector<int> v;  // strictly increasing vertex ids

    Simplex() = default;
    explicit Simplex(std::vector<int> ids);

    int dim() const { return static_cast<int>(v.size()) - 1; }
    bool contains(int vid) const;
    bool is_face_of(const Simplex& other) const;  // subset test on vertex ids

    friend bool operator==(const Simplex& a, const Simplex& b) { return a.v == b.v; }
    friend bool operator<(const Simplex& a, const Simplex& b) { return a.v < b.v; }
};

// Key type for faces inside set/map containers.
using FaceKey = std::vector<int>;

// Geometric simplicial complex: vertex table plus top simplices. The face
// lattice is derived on demand so closure under faces holds by construction.
struct Complex {
    int ambient = 0;
    std::vector<Vec> verts;      // vertex id -> coordinates
    std::vector<Simplex> tops;

    int add_vertex(const Vec& p);
    void add_top(std::vector<int> vids);  // sorts ids, rejects duplicates

    SimplexPoints points_of(const Simplex& s) const;
    SimplexPoints points_of(const FaceKey& vids) const;
    Bbox bbox_of(const Simplex& s) const;

    // Every face (all nonempty vertex subsets) of every top simplex.
    std::set<FaceKey> face_set() const;

    bool empty() const { return tops.empty(); }
};

// All nonempty subsets of a sorted id list, sorted sets themselves.
std::vector<FaceKey> faces_of(const FaceKey& vids);

// A subcomplex is a face-closed member set referencing its parent.
struct SubcomplexRef {
    const Complex* parent = nullptr;
    std::set<FaceKey> members;  // closed under faces

    bool contains(const FaceKey& f) const { return members.count(f) > 0; }
};

// Close `seeds` under faces and wrap as a subcomplex of `parent`.
SubcomplexRef subcomplex_closure(const Complex& parent, const std::vector<FaceKey>& seeds);

struct Violation {
    std::string predicate;  // e.g. "face-to-face", "degenerate-simplex"
    FaceKey a, b;           // offending simplex (pair); b may be empty
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

// Check all Complex invariants: finite uniform-dimension coordinates, sorted
// in-range vertex ids, non-degenerate top simplices, no duplicate vertex
// coordinates among used vertices, and the face-to-face property for every
// pair of top simplices. Face-to-face pairs are certified with a floating
// separating-hyperplane test and fall back to exact rational arithmetic when
// the certificate is inconclusive.
ValidationReport validate(const Complex& c, double tol = kDefaultTol);

// True when |A| and |B| meet exactly in the convex hull of their shared
// vertices (empty when none are shared). `sharedA[i]` in A corresponds to
// `sharedB[i]` in B and the matched coordinates must agree bitwise.
bool simplices_meet_in_common_face(const SimplexPoints& ptsA, const SimplexPoints& ptsB,
                                   const std::vector<int>& sharedA,
                                   const std::vector<int>& sharedB, double tol = kDefaultTol);

// True iff every parent simplex meets |L| in a single face of itself (or not
// at all). Throws std::invalid_argument when a member is not a parent face.
bool is_full_subcomplex(const SubcomplexRef& L);

// Result of a successful subcomplex intersection: the carrier in each complex
// and the simplexwise correspondence between them.
struct SharedSubcomplex {
    SubcomplexRef in_c1, in_c2;
    std::map<FaceKey, FaceKey> iso;        // member of c1 -> member of c2
    std::unordered_map<int, int> v1_to_v2;  // matched vertex ids
};

// Decide whether |c1| and |c2| intersect in a common subcomplex (vertices
// matched by coordinates within tol). Returns the carrier pair when they do,
// nullopt when the geometric intersection is not a subcomplex of both.
// Ambient dimension mismatch is an input error.
std::optional<SharedSubcomplex> intersect_in_subcomplex(const Complex& c1, const Complex& c2,
                                                        double tol = kDefaultTol);

// Glue c1 and c2 along `shared` (which must be full in both). The result
// restricted to either input reproduces it; the result is validated unless
// `check` is false.
Complex union_of_complexes(const Complex& c1, const Complex& c2, const SharedSubcomplex& shared,
                           bool check = true);

// All simplices containing v plus their faces / the faces of the star that
// avoid v. Unknown vertex ids are input errors.
SubcomplexRef star(const Complex& c, int v);
SubcomplexRef boundary_of_star(const Complex& c, int v);

}  // namespace fatmesh

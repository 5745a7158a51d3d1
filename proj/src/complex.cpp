#include "fatmesh/complex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "fatmesh/rational.hpp"

namespace fatmesh {

Simplex::Simplex(std::vector<int> ids) : v(std::move(ids)) {
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
        throw std::invalid_argument("simplex with repeated vertex id");
}

bool Simplex::contains(int vid) const {
    return std::binary_search(v.begin(), v.end(), vid);
}

bool Simplex::is_face_of(const Simplex& other) const {
    return std::includes(other.v.begin(), other.v.end(), v.begin(), v.end());
}

int Complex::add_vertex(const Vec& p) {
    if (verts.empty() && ambient == 0) ambient = static_cast<int>(p.size());
    if (static_cast<int>(p.size()) != ambient)
        throw std::invalid_argument("vertex dimension does not match complex ambient");
    verts.push_back(p);
    return static_cast<int>(verts.size()) - 1;
}

void Complex::add_top(std::vector<int> vids) {
    Simplex s(std::move(vids));
    for (int vid : s.v)
        if (vid < 0 || vid >= static_cast<int>(verts.size()))
            throw std::invalid_argument("top simplex references unknown vertex id");
    tops.push_back(std::move(s));
}

SimplexPoints Complex::points_of(const Simplex& s) const { return points_of(s.v); }

SimplexPoints Complex::points_of(const FaceKey& vids) const {
    SimplexPoints pts;
    pts.reserve(vids.size());
    for (int vid : vids) pts.push_back(verts.at(vid));
    return pts;
}

Bbox Complex::bbox_of(const Simplex& s) const { return Bbox::of(points_of(s)); }

std::vector<FaceKey> faces_of(const FaceKey& vids) {
    const int k = static_cast<int>(vids.size());
    std::vector<FaceKey> out;
    out.reserve((1u << k) - 1);
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        FaceKey f;
        for (int i = 0; i < k; ++i)
            if (mask & (1u << i)) f.push_back(vids[i]);
        out.push_back(std::move(f));
    }
    return out;
}

std::set<FaceKey> Complex::face_set() const {
    std::set<FaceKey> faces;
    for (const Simplex& t : tops)
        for (auto& f : faces_of(t.v)) faces.insert(std::move(f));
    return faces;
}

SubcomplexRef subcomplex_closure(const Complex& parent, const std::vector<FaceKey>& seeds) {
    SubcomplexRef ref;
    ref.parent = &parent;
    for (const FaceKey& s : seeds)
        for (auto& f : faces_of(s)) ref.members.insert(std::move(f));
    return ref;
}

std::string ValidationReport::summary() const {
    if (violations.empty()) return "valid";
    std::ostringstream os;
    os << violations.size() << " violation(s):";
    for (const Violation& v : violations) {
        os << "\n  " << v.predicate << " [";
        for (size_t i = 0; i < v.a.size(); ++i) os << (i ? "," : "") << v.a[i];
        os << "]";
        if (!v.b.empty()) {
            os << " vs [";
            for (size_t i = 0; i < v.b.size(); ++i) os << (i ? "," : "") << v.b[i];
            os << "]";
        }
        if (!v.detail.empty()) os << ": " << v.detail;
    }
    return os.str();
}

namespace {

// Attempt a floating-point certificate that |A| and |B| meet exactly in the
// convex hull of their shared vertices: a hyperplane through the shared
// face's affine hull that strictly supports both simplices from opposite
// sides. If such a plane exists, A /\ H and B /\ H both equal the shared
// face, so the intersection does too. Returns false when inconclusive.
bool separation_certificate(const SimplexPoints& A, const SimplexPoints& B,
                            const std::vector<int>& sharedA, const std::vector<int>& sharedB,
                            double tol) {
    const Eigen::Index n = A.front().size();
    const double scale = std::max(1.0, std::max(simplex_diameter(A), simplex_diameter(B)));

    if (sharedA.empty()) return simplex_distance(A, B) > 10 * tol * scale;
    if (sharedA.size() == A.size() && sharedB.size() == B.size())
        return true;  // identical simplices meet in themselves

    SimplexPoints S;
    for (int i : sharedA) S.push_back(A[i]);
    AffineHull hull = affine_hull(S, tol);

    auto complement = [&](const Vec& x) -> Vec {
        Vec r = x - hull.origin;
        if (hull.dim > 0) r -= hull.basis * (hull.basis.transpose() * r);
        return r;
    };

    // Unit directions that the sought normal must see positively: non-shared
    // vertices of A as-is, of B negated.
    std::vector<Vec> want;
    auto push_side = [&](const SimplexPoints& pts, const std::vector<int>& shared, double sign) {
        for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
            if (std::find(shared.begin(), shared.end(), i) != shared.end()) continue;
            Vec p = complement(pts[i]);
            if (p.norm() <= 32 * tol * scale) return false;  // vertex hugs the shared hull
            want.push_back(sign * p.normalized());
        }
        return true;
    };
    if (!push_side(A, sharedA, +1.0) || !push_side(B, sharedB, -1.0)) return false;
    if (want.empty()) return true;  // one simplex is a face of the other

    // Perceptron search for a common positive direction.
    Vec u = Vec::Zero(n);
    for (const Vec& d : want) u += d;
    const double gamma = 1e-7;
    bool found = false;
    for (int iter = 0; iter < 400 && !found; ++iter) {
        found = true;
        for (const Vec& d : want) {
            if (u.dot(d) <= gamma * u.norm()) {
                u += d;
                found = false;
            }
        }
    }
    if (!found || u.norm() == 0) return false;
    u.normalize();

    // Verify the certificate against the raw coordinates.
    const double on_tol = 4 * tol * scale;
    const double off_margin = 64 * tol * scale;
    auto height = [&](const Vec& x) { return u.dot(x - hull.origin); };
    for (int i = 0; i < static_cast<int>(A.size()); ++i) {
        const bool shared = std::find(sharedA.begin(), sharedA.end(), i) != sharedA.end();
        const double h = height(A[i]);
        if (shared ? std::abs(h) > on_tol : h < off_margin) return false;
    }
    for (int i = 0; i < static_cast<int>(B.size()); ++i) {
        const bool shared = std::find(sharedB.begin(), sharedB.end(), i) != sharedB.end();
        const double h = height(B[i]);
        if (shared ? std::abs(h) > on_tol : h > -off_margin) return false;
    }
    return true;
}

}  // namespace

bool simplices_meet_in_common_face(const SimplexPoints& ptsA, const SimplexPoints& ptsB,
                                   const std::vector<int>& sharedA,
                                   const std::vector<int>& sharedB, double tol) {
    if (separation_certificate(ptsA, ptsB, sharedA, sharedB, tol)) return true;
    return exact_intersection_is_shared_face(ptsA, ptsB, sharedA, sharedB);
}

ValidationReport validate(const Complex& c, double tol) {
    ValidationReport report;
    auto flag = [&](std::string pred, FaceKey a, FaceKey b, std::string detail) {
        report.violations.push_back({std::move(pred), std::move(a), std::move(b), std::move(detail)});
    };

    const int nverts = static_cast<int>(c.verts.size());
    for (int i = 0; i < nverts; ++i) {
        if (static_cast<int>(c.verts[i].size()) != c.ambient)
            flag("ambient-mismatch", {i}, {}, "vertex dimension differs from complex ambient");
        else if (!c.verts[i].allFinite())
            flag("non-finite-coordinate", {i}, {}, "");
    }

    std::vector<bool> structurally_ok(c.tops.size(), true);
    std::set<FaceKey> seen_tops;
    for (size_t t = 0; t < c.tops.size(); ++t) {
        const Simplex& s = c.tops[t];
        if (s.v.empty()) {
            flag("empty-simplex", {}, {}, "");
            structurally_ok[t] = false;
            continue;
        }
        bool ids_ok = true;
        for (size_t i = 0; i < s.v.size(); ++i) {
            if (s.v[i] < 0 || s.v[i] >= nverts) ids_ok = false;
            if (i > 0 && s.v[i] <= s.v[i - 1]) ids_ok = false;
        }
        if (!ids_ok) {
            flag("bad-vertex-ids", s.v, {}, "ids must be strictly increasing and in range");
            structurally_ok[t] = false;
            continue;
        }
        if (s.dim() > c.ambient) {
            flag("dimension-exceeds-ambient", s.v, {}, "");
            structurally_ok[t] = false;
            continue;
        }
        if (!seen_tops.insert(s.v).second) {
            flag("duplicate-top", s.v, {}, "");
            structurally_ok[t] = false;
            continue;
        }
        if (!is_nondegenerate_simplex(c.points_of(s), tol)) {
            flag("degenerate-simplex", s.v, {}, "zero volume within tolerance");
            structurally_ok[t] = false;
        }
    }

    // Duplicate coordinates among vertices actually referenced by tops.
    std::vector<int> used;
    {
        std::vector<bool> mark(nverts, false);
        for (size_t t = 0; t < c.tops.size(); ++t)
            if (structurally_ok[t])
                for (int vid : c.tops[t].v) mark[vid] = true;
        for (int i = 0; i < nverts; ++i)
            if (mark[i]) used.push_back(i);
    }
    {
        std::vector<int> order = used;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::lexicographical_compare(c.verts[a].data(), c.verts[a].data() + c.verts[a].size(),
                                                c.verts[b].data(), c.verts[b].data() + c.verts[b].size());
        });
        for (size_t i = 0; i < order.size(); ++i) {
            for (size_t j = i + 1; j < order.size(); ++j) {
                const Vec& a = c.verts[order[i]];
                const Vec& b = c.verts[order[j]];
                if (b.size() != a.size() || (a.size() > 0 && b[0] - a[0] > tol)) break;
                if ((a - b).lpNorm<Eigen::Infinity>() <= tol)
                    flag("duplicate-vertex", {std::min(order[i], order[j])},
                         {std::max(order[i], order[j])}, "distinct ids share coordinates");
            }
        }
    }

    // Pairwise face-to-face property over top simplices, bbox-pruned by a
    // sweep on the first coordinate.
    std::vector<size_t> idx;
    std::vector<Bbox> boxes(c.tops.size());
    for (size_t t = 0; t < c.tops.size(); ++t) {
        if (!structurally_ok[t] || c.ambient == 0) continue;
        boxes[t] = c.bbox_of(c.tops[t]);
        idx.push_back(t);
    }
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return boxes[a].lo[0] < boxes[b].lo[0]; });
    const double slack = 10 * tol;
    for (size_t ii = 0; ii < idx.size(); ++ii) {
        const size_t a = idx[ii];
        for (size_t jj = ii + 1; jj < idx.size(); ++jj) {
            const size_t b = idx[jj];
            if (boxes[b].lo[0] > boxes[a].hi[0] + slack) break;
            if (!boxes[a].intersects(boxes[b], slack)) continue;
            const Simplex& sa = c.tops[a];
            const Simplex& sb = c.tops[b];
            std::vector<int> sharedA, sharedB;
            for (size_t i = 0; i < sa.v.size(); ++i) {
                auto it = std::lower_bound(sb.v.begin(), sb.v.end(), sa.v[i]);
                if (it != sb.v.end() && *it == sa.v[i]) {
                    sharedA.push_back(static_cast<int>(i));
                    sharedB.push_back(static_cast<int>(it - sb.v.begin()));
                }
            }
            if (!simplices_meet_in_common_face(c.points_of(sa), c.points_of(sb), sharedA, sharedB, tol))
                flag("face-to-face", sa.v, sb.v, "intersection is not the common face");
        }
    }
    return report;
}

bool is_full_subcomplex(const SubcomplexRef& L) {
    if (!L.parent) throw std::invalid_argument("subcomplex without parent");
    const Complex& c = *L.parent;
    if (L.members.empty()) return true;
    const std::set<FaceKey> parent_faces = c.face_set();
    for (const FaceKey& m : L.members)
        if (!parent_faces.count(m))
            throw std::invalid_argument("subcomplex member is not a simplex of the parent");

    // In a face-to-face complex, |top| /\ |L| is the union of the faces
    // spanned by top /\ member vertex sets; it is itself a face exactly when
    // one member realizes the whole union. Lower faces of a passing top pass
    // automatically, so only tops need checking.
    for (const Simplex& top : c.tops) {
        std::set<int> w;
        for (const FaceKey& m : L.members) {
            std::vector<int> inter;
            std::set_intersection(top.v.begin(), top.v.end(), m.begin(), m.end(),
                                  std::back_inserter(inter));
            w.insert(inter.begin(), inter.end());
        }
        if (w.empty()) continue;
        const FaceKey wkey(w.begin(), w.end());
        if (!L.members.count(wkey)) return false;
        // wkey is a member and contains every per-member intersection, so the
        // union is conv(wkey) provided wkey is a face of top — which it is,
        // being a subset of top's vertices.
    }
    return true;
}

namespace {

// Spatial hash for matching vertices by coordinates within tol.
class VertexGrid {
  public:
    VertexGrid(const std::vector<Vec>& pts, double cell) : pts_(pts), cell_(cell) {
        for (size_t i = 0; i < pts.size(); ++i) cells_[key(pts[i])].push_back(static_cast<int>(i));
    }

    // Nearest point within `tol` of x, or -1.
    int nearest(const Vec& x, double tol) const {
        const int n = static_cast<int>(x.size());
        std::vector<long long> base(n);
        for (int i = 0; i < n; ++i) base[i] = static_cast<long long>(std::floor(x[i] / cell_));
        int best = -1;
        double best_d = tol;
        std::vector<long long> cur(n);
        int total = 1;
        for (int i = 0; i < n; ++i) total *= 3;
        for (int m = 0; m < total; ++m) {
            int mm = m;
            for (int i = 0; i < n; ++i) {
                cur[i] = base[i] + (mm % 3) - 1;
                mm /= 3;
            }
            auto it = cells_.find(key_of(cur));
            if (it == cells_.end()) continue;
            for (int id : it->second) {
                const double d = (pts_[id] - x).norm();
                if (d <= best_d) {
                    best_d = d;
                    best = id;
                }
            }
        }
        return best;
    }

  private:
    std::uint64_t key(const Vec& p) const {
        const int n = static_cast<int>(p.size());
        std::vector<long long> c(n);
        for (int i = 0; i < n; ++i) c[i] = static_cast<long long>(std::floor(p[i] / cell_));
        return key_of(c);
    }
    static std::uint64_t key_of(const std::vector<long long>& c) {
        std::string bytes(reinterpret_cast<const char*>(c.data()), c.size() * sizeof(long long));
        return fnv1a(bytes);
    }

    const std::vector<Vec>& pts_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace

std::optional<SharedSubcomplex> intersect_in_subcomplex(const Complex& c1, const Complex& c2,
                                                        double tol) {
    if (c1.ambient != c2.ambient)
        throw std::invalid_argument("intersect_in_subcomplex: ambient dimension mismatch");

    SharedSubcomplex out;
    out.in_c1.parent = &c1;
    out.in_c2.parent = &c2;
    if (c1.tops.empty() || c2.tops.empty()) return out;

    // Match vertices by coordinates; c1's coordinates are canonical.
    double diag = 1.0;
    {
        Bbox all = Bbox::of(c1.verts);
        diag = std::max(diag, all.diag());
    }
    VertexGrid grid(c2.verts, std::max(1e-6 * diag, 16 * tol));
    std::unordered_map<int, int> v2_to_v1;
    for (int i = 0; i < static_cast<int>(c1.verts.size()); ++i) {
        const int j = grid.nearest(c1.verts[i], tol);
        if (j < 0) continue;
        auto it = v2_to_v1.find(j);
        if (it == v2_to_v1.end() ||
            (c2.verts[j] - c1.verts[i]).norm() < (c2.verts[j] - c1.verts[it->second]).norm())
            v2_to_v1[j] = i;
    }
    for (auto [j, i] : v2_to_v1) out.v1_to_v2[i] = j;

    // Snap matched c2 vertices onto their c1 coordinates so downstream
    // predicates see bitwise-equal shared points.
    std::vector<Vec> snapped2 = c2.verts;
    for (auto [j, i] : v2_to_v1) snapped2[j] = c1.verts[i];

    // Candidate shared members: faces of c1 whose matched image is a face of c2.
    const std::set<FaceKey> faces2 = c2.face_set();
    for (const FaceKey& f : c1.face_set()) {
        FaceKey g;
        g.reserve(f.size());
        bool matched = true;
        for (int vid : f) {
            auto it = out.v1_to_v2.find(vid);
            if (it == out.v1_to_v2.end()) {
                matched = false;
                break;
            }
            g.push_back(it->second);
        }
        if (!matched) continue;
        std::sort(g.begin(), g.end());
        if (!faces2.count(g)) continue;
        out.in_c1.members.insert(f);
        out.in_c2.members.insert(g);
        out.iso[f] = g;
    }

    // Geometric completeness: every cross pair of tops must meet exactly in
    // its matched common face, otherwise the intersection is not a subcomplex.
    std::vector<Bbox> box1(c1.tops.size()), box2(c2.tops.size());
    for (size_t t = 0; t < c1.tops.size(); ++t) box1[t] = c1.bbox_of(c1.tops[t]);
    for (size_t t = 0; t < c2.tops.size(); ++t) box2[t] = Bbox::of([&] {
        SimplexPoints pts;
        for (int vid : c2.tops[t].v) pts.push_back(snapped2[vid]);
        return pts;
    }());
    const double slack = 10 * tol;
    for (size_t a = 0; a < c1.tops.size(); ++a) {
        const SimplexPoints ptsA = c1.points_of(c1.tops[a]);
        for (size_t b = 0; b < c2.tops.size(); ++b) {
            if (!box1[a].intersects(box2[b], slack)) continue;
            const Simplex& sb = c2.tops[b];
            SimplexPoints ptsB;
            for (int vid : sb.v) ptsB.push_back(snapped2[vid]);
            std::vector<int> sharedA, sharedB;
            for (size_t i = 0; i < c1.tops[a].v.size(); ++i) {
                auto it = out.v1_to_v2.find(c1.tops[a].v[i]);
                if (it == out.v1_to_v2.end()) continue;
                auto pos = std::lower_bound(sb.v.begin(), sb.v.end(), it->second);
                if (pos != sb.v.end() && *pos == it->second) {
                    sharedA.push_back(static_cast<int>(i));
                    sharedB.push_back(static_cast<int>(pos - sb.v.begin()));
                }
            }
            if (!simplices_meet_in_common_face(ptsA, ptsB, sharedA, sharedB, tol))
                return std::nullopt;
        }
    }
    return out;
}

Complex union_of_complexes(const Complex& c1, const Complex& c2, const SharedSubcomplex& shared,
                           bool check) {
    if (!is_full_subcomplex(shared.in_c1))
        throw std::invalid_argument("union_of_complexes: shared subcomplex is not full in c1");
    if (!is_full_subcomplex(shared.in_c2))
        throw std::invalid_argument("union_of_complexes: shared subcomplex is not full in c2");

    Complex out = c1;
    std::unordered_map<int, int> map2;  // c2 vid -> out vid
    for (auto [i, j] : shared.v1_to_v2) map2[j] = i;
    for (int j = 0; j < static_cast<int>(c2.verts.size()); ++j)
        if (!map2.count(j)) map2[j] = out.add_vertex(c2.verts[j]);

    std::set<FaceKey> have;
    for (const Simplex& t : out.tops) have.insert(t.v);
    for (const Simplex& t : c2.tops) {
        FaceKey vids;
        vids.reserve(t.v.size());
        for (int vid : t.v) vids.push_back(map2.at(vid));
        std::sort(vids.begin(), vids.end());
        if (have.insert(vids).second) out.add_top(vids);
    }

    if (check) {
        ValidationReport rep = validate(out);
        if (!rep.ok())
            throw std::runtime_error("union_of_complexes produced an invalid complex: " +
                                     rep.summary());
    }
    return out;
}

SubcomplexRef star(const Complex& c, int v) {
    if (v < 0 || v >= static_cast<int>(c.verts.size()))
        throw std::invalid_argument("star: unknown vertex id");
    std::vector<FaceKey> seeds;
    for (const Simplex& t : c.tops)
        if (t.contains(v)) seeds.push_back(t.v);
    return subcomplex_closure(c, seeds);
}

SubcomplexRef boundary_of_star(const Complex& c, int v) {
    SubcomplexRef st = star(c, v);
    SubcomplexRef out;
    out.parent = st.parent;
    for (const FaceKey& f : st.members)
        if (!std::binary_search(f.begin(), f.end(), v)) out.members.insert(f);
    return out;
}

}  // namespace fatmesh

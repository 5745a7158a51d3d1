// Merging two overlapping triangulations of the same ambient space. The
// first complex is swept into general position against the second (vertex
// nudges bounded by the calibrated displacement schedule), then the overlap
// is retriangulated from the pairwise intersection cells and the touched
// simplices are coned back onto the untouched far fields.
//
// Conformity rests on one rule: every geometric piece is computed exactly
// once, memoized under its (first-complex face, second-complex face) id
// pair, and every coning step enumerates its boundary through those shared
// keys. Neighboring output simplices therefore receive bitwise-identical
// copies of their shared interface; a final weld pass absorbs the remaining
// ulp drift between corners that were still computed twice.

#include "fatmesh/merge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <utility>

#include <Eigen/Dense>

#include "fatmesh/convex.hpp"

namespace fatmesh {

namespace {

constexpr double kVolSlack = 1e-9;  // relative volume-bookkeeping tolerance

// splitmix64; decorrelates the per-(stage, vertex) sampling streams.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, int stage, int vertex) {
    return mix64(seed ^ mix64((static_cast<std::uint64_t>(stage) << 32) +
                              static_cast<std::uint64_t>(vertex) + 1));
}

int dim_of(const FaceKey& f) { return static_cast<int>(f.size()) - 1; }

std::vector<FaceKey> facet_keys(const FaceKey& f) {
    std::vector<FaceKey> out;
    if (f.size() < 2) return out;
    out.reserve(f.size());
    for (std::size_t skip = 0; skip < f.size(); ++skip) {
        FaceKey g;
        g.reserve(f.size() - 1);
        for (std::size_t i = 0; i < f.size(); ++i)
            if (i != skip) g.push_back(f[i]);
        out.push_back(std::move(g));
    }
    return out;
}

// Every nonempty subset of `top` of dimension at most maxdim.
void faces_up_to(const FaceKey& top, int maxdim, std::set<FaceKey>& out) {
    const int m = static_cast<int>(top.size());
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        if (__builtin_popcount(mask) - 1 > maxdim) continue;
        FaceKey f;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) f.push_back(top[i]);
        out.insert(std::move(f));
    }
}

std::string key_str(const FaceKey& f) {
    std::string s = "{";
    for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + std::to_string(f[i]);
    return s + "}";
}

Vec centroid_of(const SimplexPoints& pts) {
    Vec c = Vec::Zero(pts[0].size());
    for (const Vec& p : pts) c += p;
    return c / static_cast<double>(pts.size());
}

bool lex_less(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

// Unit normal and offset c (normal . x = c) of the hyperplane spanned by an
// (n-1)-simplex in ambient dimension n.
std::pair<Vec, double> facet_plane(const SimplexPoints& pts) {
    const int n = static_cast<int>(pts[0].size());
    Eigen::MatrixXd edges(n, static_cast<int>(pts.size()) - 1);
    for (std::size_t j = 1; j < pts.size(); ++j) edges.col(j - 1) = pts[j] - pts[0];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(edges, Eigen::ComputeFullU);
    Vec normal = svd.matrixU().col(n - 1);
    return {normal, normal.dot(pts[0])};
}

// One intersection fa-and-fb (faces of the two complexes): the convex cell,
// its intrinsic measure, and a conforming triangulation built on demand.
struct Piece {
    bool empty = true;
    int dim = -1;
    double vol = 0.0;
    std::optional<ConvexCell> cell;
    bool tri_built = false;
    std::vector<SimplexPoints> tri;
};

// Refinement of one face against the other complex: the covered pieces, the
// uncovered remainder, or "whole" when nothing touches it (not even through
// a deeper face).
struct FaceDecomp {
    bool whole = true;
    double vol = 0.0;     // intrinsic measure of the face
    double in_vol = 0.0;  // measure covered by the other complex
    std::vector<SimplexPoints> in, out;
};

// Shared piece/decomposition memo of one merge. Side 0 is the first (moving)
// complex, side 1 the fixed one; all piece keys put the side-0 face first.
class MergeEngine {
  public:
    MergeEngine(const Complex& a, const Complex& b, double tol);

    // Overlap discovery, filled by the constructor.
    std::vector<int> band[2];        // indices of tops with positive pair volume
    std::vector<double> covered[2];  // per-top volume covered by the other side
    std::vector<double> top_vol[2];
    double overlap_vol = 0.0;
    double max_band_diam = 0.0;
    double min_band_edge = std::numeric_limits<double>::infinity();
    bool has_band = false;
    Bbox band_box;  // hull of all overlapping tops, both sides

    double scale() const { return scale_; }
    double meet_slack() const { return meet_slack_; }

    const Piece& piece(const FaceKey& fa, const FaceKey& fb);  // with triangulation
    const FaceDecomp& decomp(int side, const FaceKey& f);

  private:
    Piece& piece_cell(const FaceKey& fa, const FaceKey& fb);  // cell and volume only
    void build_cut_faces(int side);
    void out_part(int side, const FaceKey& f, const SimplexPoints& pts,
                  const std::vector<std::pair<FaceKey, const Piece*>>& partners, double expected,
                  FaceDecomp& d);

    const Complex& a_;
    const Complex& b_;
    int n_ = 0;
    double tol_ = 0.0, scale_ = 1.0, meet_slack_ = 0.0;
    std::vector<Bbox> box_[2];
    std::map<std::pair<FaceKey, FaceKey>, Piece> pieces_;
    std::map<FaceKey, FaceDecomp> decomp_[2];
    std::vector<FaceKey> cut_faces_[2];  // boundary (n-1)-faces of overlapping tops
    std::vector<int> cut_owner_[2];      // index of the unique top above each cut face
    std::vector<Bbox> cut_box_[2];
};

MergeEngine::MergeEngine(const Complex& a, const Complex& b, double tol) : a_(a), b_(b) {
    n_ = a.ambient;
    Vec lo = a.verts.front(), hi = a.verts.front();
    for (const Complex* c : {&a_, &b_})
        for (const Vec& p : c->verts) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    scale_ = std::max(1.0, (hi - lo).norm());
    tol_ = tol * scale_;
    meet_slack_ = 10 * tol_;

    box_[0].reserve(a.tops.size());
    for (const Simplex& t : a.tops) box_[0].push_back(a.bbox_of(t));
    box_[1].reserve(b.tops.size());
    for (const Simplex& t : b.tops) box_[1].push_back(b.bbox_of(t));
    covered[0].assign(a.tops.size(), 0.0);
    covered[1].assign(b.tops.size(), 0.0);
    for (const Simplex& t : a.tops) top_vol[0].push_back(simplex_volume(a.points_of(t)));
    for (const Simplex& t : b.tops) top_vol[1].push_back(simplex_volume(b.points_of(t)));

    std::set<int> inband[2];
    for (std::size_t ia = 0; ia < a.tops.size(); ++ia)
        for (std::size_t ib = 0; ib < b.tops.size(); ++ib) {
            if (!box_[0][ia].intersects(box_[1][ib], meet_slack_)) continue;
            const Piece& p = piece_cell(a.tops[ia].v, b.tops[ib].v);
            if (p.empty || p.dim != n_) continue;
            if (p.vol <= kVolSlack * std::min(top_vol[0][ia], top_vol[1][ib])) continue;
            covered[0][ia] += p.vol;
            covered[1][ib] += p.vol;
            overlap_vol += p.vol;
            inband[0].insert(static_cast<int>(ia));
            inband[1].insert(static_cast<int>(ib));
        }
    for (int side = 0; side < 2; ++side) {
        band[side].assign(inband[side].begin(), inband[side].end());
        const Complex& own = side == 0 ? a_ : b_;
        for (int t : band[side]) {
            const SimplexPoints pts = own.points_of(own.tops[t].v);
            max_band_diam = std::max(max_band_diam, simplex_diameter(pts));
            for (std::size_t i = 0; i < pts.size(); ++i)
                for (std::size_t j = i + 1; j < pts.size(); ++j)
                    min_band_edge = std::min(min_band_edge, (pts[i] - pts[j]).norm());
            const Bbox& tb = box_[side][t];
            if (!has_band && side == 0 && t == band[0].front()) band_box = tb;
            band_box.lo = band_box.lo.cwiseMin(tb.lo);
            band_box.hi = band_box.hi.cwiseMax(tb.hi);
        }
    }
    has_band = !band[0].empty();
    build_cut_faces(0);
    build_cut_faces(1);
}

void MergeEngine::build_cut_faces(int side) {
    const Complex& own = side == 0 ? a_ : b_;
    std::map<FaceKey, std::pair<int, int>> count;  // (n-1)-face -> (cofacets, last top)
    for (std::size_t t = 0; t < own.tops.size(); ++t)
        for (const FaceKey& g : facet_keys(own.tops[t].v)) {
            auto& e = count[g];
            ++e.first;
            e.second = static_cast<int>(t);
        }
    const std::set<int> inband(band[side].begin(), band[side].end());
    for (const auto& [g, e] : count) {
        if (e.first != 1 || !inband.count(e.second)) continue;
        cut_faces_[side].push_back(g);
        cut_owner_[side].push_back(e.second);
        cut_box_[side].push_back(Bbox::of(own.points_of(g)));
    }
}

Piece& MergeEngine::piece_cell(const FaceKey& fa, const FaceKey& fb) {
    auto key = std::make_pair(fa, fb);
    auto it = pieces_.find(key);
    if (it != pieces_.end()) return it->second;
    Piece p;
    std::optional<ConvexCell> cell = intersect_simplices(a_.points_of(fa), b_.points_of(fb), tol_);
    if (cell) {
        p.empty = false;
        p.dim = cell->dim;
        p.vol = cell->dim == 0 ? 0.0 : cell_volume(*cell);
        p.cell = std::move(cell);
    }
    return pieces_.emplace(std::move(key), std::move(p)).first->second;
}

const Piece& MergeEngine::piece(const FaceKey& fa, const FaceKey& fb) {
    Piece& p = piece_cell(fa, fb);
    if (p.empty || p.tri_built) return p;
    const ConvexCell& cell = *p.cell;
    if (cell.dim == 0) {
        p.tri = {SimplexPoints{cell.verts[0]}};
    } else if (static_cast<int>(cell.verts.size()) == cell.dim + 1) {
        p.tri = {cell.verts};
    } else {
        // Cone from the deepest interior point over the boundary pieces; the
        // boundary is enumerated through the face ids so that neighboring
        // cells receive bitwise-identical copies of shared pieces.
        const Vec apex = chebyshev_point(cell).first;
        std::vector<SimplexPoints> bases;
        for (const FaceKey& g : facet_keys(fa)) {
            const Piece& q = piece(g, fb);
            if (!q.empty && q.dim == cell.dim - 1)
                bases.insert(bases.end(), q.tri.begin(), q.tri.end());
        }
        for (const FaceKey& g : facet_keys(fb)) {
            const Piece& q = piece(fa, g);
            if (!q.empty && q.dim == cell.dim - 1)
                bases.insert(bases.end(), q.tri.begin(), q.tri.end());
        }
        double vol = 0.0;
        for (const SimplexPoints& bpts : bases) {
            SimplexPoints s;
            s.reserve(bpts.size() + 1);
            s.push_back(apex);
            s.insert(s.end(), bpts.begin(), bpts.end());
            const double sv = simplex_volume(s);
            if (sv <= 1e-13 * p.vol) continue;  // base hyperplane through the apex
            vol += sv;
            p.tri.push_back(std::move(s));
        }
        const double slack = std::max(kVolSlack * p.vol,
                                      1e-12 * std::pow(simplex_diameter(cell.verts), cell.dim));
        if (std::abs(vol - p.vol) > slack)
            throw MergeFailure("merge: triangulating intersection cell " + key_str(fa) + " x " +
                                   key_str(fb) + " missed its volume",
                               {}, fa);
    }
    p.tri_built = true;
    return p;
}

const FaceDecomp& MergeEngine::decomp(int side, const FaceKey& f) {
    auto it = decomp_[side].find(f);
    if (it != decomp_[side].end()) return it->second;

    const Complex& own = side == 0 ? a_ : b_;
    const Complex& other = side == 0 ? b_ : a_;
    const int k = dim_of(f);
    FaceDecomp d;
    const SimplexPoints pts = own.points_of(f);
    d.vol = simplex_volume(pts);
    const Bbox fbox = Bbox::of(pts);

    // Partners: overlapping tops of the other complex meeting f with full
    // dimension k.
    std::vector<std::pair<FaceKey, const Piece*>> partners;
    for (int ti : band[1 - side]) {
        if (!fbox.intersects(box_[1 - side][ti], meet_slack_)) continue;
        const FaceKey& tf = other.tops[ti].v;
        const Piece& p = side == 0 ? piece(f, tf) : piece(tf, f);
        if (!p.empty && p.dim == k && p.vol > 1e-12 * d.vol) partners.push_back({tf, &p});
    }

    if (partners.empty()) {
        bool split = false;
        if (k >= 2)
            for (const FaceKey& g : facet_keys(f))
                if (!decomp(side, g).whole) split = true;
        if (split) {
            // A deeper face was refined: fan this face from its own interior
            // point so the refinement propagates without touching the
            // neighbors' boundaries.
            d.whole = false;
            const Vec apex = chebyshev_point(cell_from_points(pts, tol_)).first;
            double vol = 0.0;
            auto cone = [&](const SimplexPoints& base) {
                SimplexPoints s;
                s.reserve(base.size() + 1);
                s.push_back(apex);
                s.insert(s.end(), base.begin(), base.end());
                const double sv = simplex_volume(s);
                if (sv <= 1e-13 * d.vol) return;
                vol += sv;
                d.out.push_back(std::move(s));
            };
            for (const FaceKey& g : facet_keys(f)) {
                const FaceDecomp& dg = decomp(side, g);
                if (dg.whole) {
                    cone(own.points_of(g));
                } else {
                    for (const SimplexPoints& s : dg.in) cone(s);
                    for (const SimplexPoints& s : dg.out) cone(s);
                }
            }
            if (std::abs(vol - d.vol) >
                std::max(kVolSlack * d.vol, 1e-12 * std::pow(simplex_diameter(pts), k)))
                throw MergeFailure(
                    "merge: fan refinement of face " + key_str(f) + " missed its volume", {}, f);
        }
    } else {
        d.whole = false;
        for (const auto& [tf, p] : partners) {
            d.in.insert(d.in.end(), p->tri.begin(), p->tri.end());
            d.in_vol += p->vol;
        }
        if (d.in_vol > d.vol * (1 + 1e-7))
            throw MergeFailure("merge: intersection pieces of face " + key_str(f) +
                                   " overlap one another (a non-transverse contact survived "
                                   "the sweep)",
                               {}, f);
        const double out_vol = d.vol - d.in_vol;
        if (out_vol > kVolSlack * d.vol) out_part(side, f, pts, partners, out_vol, d);
    }
    return decomp_[side].emplace(f, std::move(d)).first->second;
}

void MergeEngine::out_part(int side, const FaceKey& f, const SimplexPoints& pts,
                           const std::vector<std::pair<FaceKey, const Piece*>>& partners,
                           double expected, FaceDecomp& d) {
    const Complex& own = side == 0 ? a_ : b_;
    const Complex& foreign = side == 0 ? b_ : a_;
    const int k = dim_of(f);

    if (k == 1) {
        // One-dimensional remainder: sorted breakpoints along the edge, one
        // segment per uncovered gap (several components are fine here).
        const Vec& e0 = pts[0];
        const Vec dir = pts[1] - pts[0];
        const double len2 = dir.squaredNorm();
        std::vector<std::pair<double, Vec>> bp;
        bp.push_back({0.0, pts[0]});
        bp.push_back({1.0, pts[1]});
        for (const auto& [tf, p] : partners)
            for (const SimplexPoints& seg : p->tri)
                for (const Vec& q : seg) bp.push_back({(q - e0).dot(dir) / len2, q});
        std::sort(bp.begin(), bp.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first < y.first;
            return lex_less(x.second, y.second);
        });
        std::vector<std::pair<double, Vec>> uni;
        for (const auto& e : bp)
            if (uni.empty() || e.first - uni.back().first > 1e-9) uni.push_back(e);
        double vol = 0.0;
        for (std::size_t i = 0; i + 1 < uni.size(); ++i) {
            if (uni[i + 1].first - uni[i].first <= 1e-9) continue;
            const Vec mid = e0 + 0.5 * (uni[i].first + uni[i + 1].first) * dir;
            bool inside = false;
            for (const auto& [tf, p] : partners)
                if (point_in_simplex(foreign.points_of(tf), mid, tol_)) {
                    inside = true;
                    break;
                }
            if (inside) continue;
            SimplexPoints s{uni[i].second, uni[i + 1].second};
            vol += simplex_volume(s);
            d.out.push_back(std::move(s));
        }
        if (std::abs(vol - expected) > std::max(kVolSlack * d.vol, 1e-12 * std::sqrt(len2)))
            throw MergeFailure(
                "merge: uncovered intervals of edge " + key_str(f) + " missed their length", {},
                f);
        return;
    }

    // k >= 2: cone the remainder from points behind its cuts. The cuts are
    // the traces of the other complex's boundary faces on f; their pieces
    // and the facets' own remainders bound the uncovered region exactly.
    // That region can be disconnected -- several corners of f sticking out
    // past different boundary faces share no interior point -- so no single
    // apex sees all of it. Cuts that jointly leave full-dimensional room
    // behind them are grouped, and each group cones its own component.
    const Bbox fbox = Bbox::of(pts);
    const double dref = simplex_diameter(pts);
    const ConvexCell cell = cell_from_points(pts, tol_);
    std::vector<std::pair<Vec, double>> planes;  // remainder side is n.x <= c
    std::vector<const Piece*> traces;            // trace pieces per kept cut
    const auto& cutf = cut_faces_[1 - side];
    for (std::size_t ci = 0; ci < cutf.size(); ++ci) {
        if (!fbox.intersects(cut_box_[1 - side][ci], meet_slack_)) continue;
        const Piece& p = side == 0 ? piece(f, cutf[ci]) : piece(cutf[ci], f);
        if (p.empty || p.dim != k - 1 || p.vol <= 1e-12 * std::pow(dref, k - 1)) continue;
        auto [normal, c] = facet_plane(foreign.points_of(cutf[ci]));
        // Keep the side of the cut away from the top the cut face bounds:
        // after orienting, the owner's centroid must violate normal.x <= c.
        const Vec inward =
            centroid_of(foreign.points_of(foreign.tops[cut_owner_[1 - side][ci]].v));
        if (normal.dot(inward) < c) {
            normal = -normal;
            c = -c;
        }
        // A trace hugging the boundary of f bounds no remainder here; skip
        // it instead of coning over a sliver.
        std::optional<ConvexCell> behind = clip_cell(cell, normal, c, tol_);
        if (!behind || behind->dim < k) continue;
        planes.push_back({normal, c});
        traces.push_back(&p);
    }

    const int nc = static_cast<int>(planes.size());
    std::vector<int> parent(nc);
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < nc; ++i)
        for (int j = i + 1; j < nc; ++j) {
            if (find(i) == find(j)) continue;
            std::optional<ConvexCell> both =
                clip_cell(cell, planes[i].first, planes[i].second, tol_);
            if (both) both = clip_cell(*both, planes[j].first, planes[j].second, tol_);
            if (both && both->dim == k) parent[find(i)] = find(j);
        }
    std::map<int, int> group_of_root;
    std::vector<std::vector<int>> groups;  // plane indices per group
    std::vector<int> cut_group(nc);
    for (int i = 0; i < nc; ++i) {
        auto [it, fresh] = group_of_root.try_emplace(find(i), static_cast<int>(groups.size()));
        if (fresh) groups.emplace_back();
        groups[it->second].push_back(i);
        cut_group[i] = it->second;
    }
    if (groups.empty()) groups.emplace_back();  // no cuts: cone the whole cell

    std::vector<Vec> apex(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        ConvexCell kernel = cell;
        for (int i : groups[g]) {
            std::optional<ConvexCell> clipped =
                clip_cell(kernel, planes[i].first, planes[i].second, tol_);
            if (!clipped || clipped->dim < k)
                throw MergeFailure("merge: remainder of face " + key_str(f) +
                                       " is not star-shaped behind its cuts",
                                   {}, f);
            kernel = std::move(*clipped);
        }
        const auto [pt, depth] = chebyshev_point(kernel);
        if (!(depth > tol_))
            throw MergeFailure("merge: remainder of face " + key_str(f) +
                                   " has no interior point behind its cuts",
                               {}, f);
        apex[g] = pt;
    }

    // Trace pieces cone in their own cut's group; a facet remainder cones in
    // the group it sits deepest behind. With a single group the choice is
    // moot, and the volume audit below catches any misassignment.
    const auto group_for = [&](const SimplexPoints& b) {
        if (groups.size() == 1) return 0;
        const Vec p = centroid_of(b);
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < groups.size(); ++g) {
            double score = std::numeric_limits<double>::infinity();
            for (int i : groups[g])
                score = std::min(score, planes[i].second - planes[i].first.dot(p));
            if (score > best_score) {
                best_score = score;
                best = static_cast<int>(g);
            }
        }
        return best;
    };
    std::vector<std::pair<SimplexPoints, int>> bases;
    for (const FaceKey& g : facet_keys(f)) {
        const FaceDecomp& dg = decomp(side, g);
        if (dg.whole) {
            SimplexPoints gp = own.points_of(g);
            const int grp = group_for(gp);
            bases.push_back({std::move(gp), grp});
        } else {
            for (const SimplexPoints& s : dg.out) bases.push_back({s, group_for(s)});
        }
    }
    for (int i = 0; i < nc; ++i)
        for (const SimplexPoints& s : traces[i]->tri) bases.push_back({s, cut_group[i]});

    double vol = 0.0;
    for (auto& [bpts, g] : bases) {
        SimplexPoints s;
        s.reserve(bpts.size() + 1);
        s.push_back(apex[g]);
        s.insert(s.end(), bpts.begin(), bpts.end());
        const double sv = simplex_volume(s);
        if (sv <= 1e-13 * d.vol) continue;
        vol += sv;
        d.out.push_back(std::move(s));
    }
    if (std::abs(vol - expected) >
        std::max(kVolSlack * d.vol, 1e-12 * std::pow(dref, k)))
        throw MergeFailure("merge: remainder of face " + key_str(f) +
                               " is not star-shaped (cone volume drifts)",
                           {}, f);
}

// Canonical vertex table of the merged complex. The first complex's vertices
// go in first (ids preserved), then the fixed complex's, then new points in
// emission order; points within tol of an existing entry weld onto the
// smallest matching id.
class WeldTable {
  public:
    WeldTable(int dim, double tol) : dim_(dim), tol_(tol), h_(4 * tol) {}

    std::vector<Vec> reps;

    int force_add(const Vec& p) {
        const int id = static_cast<int>(reps.size());
        reps.push_back(p);
        grid_[key_of(p)].push_back(id);
        return id;
    }

    int map_point(const Vec& p) {
        int best = -1;
        CellKey base = key_of(p), probe = base;
        visit(base, probe, 0, [&](int id) {
            if ((reps[id] - p).norm() <= tol_ && (best < 0 || id < best)) best = id;
        });
        return best >= 0 ? best : force_add(p);
    }

  private:
    using CellKey = std::vector<long long>;

    CellKey key_of(const Vec& p) const {
        CellKey k(dim_);
        for (int i = 0; i < dim_; ++i) k[i] = static_cast<long long>(std::floor(p[i] / h_));
        return k;
    }

    template <class F>
    void visit(const CellKey& base, CellKey& probe, int axis, const F& fn) {
        if (axis == dim_) {
            auto it = grid_.find(probe);
            if (it != grid_.end())
                for (int id : it->second) fn(id);
            return;
        }
        for (long long d = -1; d <= 1; ++d) {
            probe[axis] = base[axis] + d;
            visit(base, probe, axis + 1, fn);
        }
        probe[axis] = base[axis];
    }

    int dim_;
    double tol_, h_;
    std::map<CellKey, std::vector<int>> grid_;
};

}  // namespace

std::string move_record_json(const MoveRecord& rec) {
    char num[40];
    std::string s =
        "{\"stage\":" + std::to_string(rec.stage) + ",\"vertex\":" + std::to_string(rec.vertex);
    auto coords = [&](const char* name, const Vec& v) {
        s += std::string(",\"") + name + "\":[";
        for (int i = 0; i < v.size(); ++i) {
            std::snprintf(num, sizeof num, "%.17g", v[i]);
            if (i) s += ",";
            s += num;
        }
        s += "]";
    };
    coords("from", rec.from);
    coords("to", rec.to);
    std::snprintf(num, sizeof num, "%.17g", rec.margin);
    s += std::string(",\"margin\":") + num + "}";
    return s;
}

MergeResult merge_fat_triangulations(const Complex& c1, const Complex& c2,
                                     const MergeConfig& cfg) {
    const int n = c1.ambient;
    if (c1.empty() || c2.empty())
        throw std::invalid_argument("merge: both complexes need top simplices");
    if (c2.ambient != n) throw std::invalid_argument("merge: ambient dimensions differ");
    if (n < 2) throw std::invalid_argument("merge: ambient dimension must be at least 2");
    for (const Complex* c : {&c1, &c2})
        for (const Simplex& t : c->tops)
            if (t.dim() != n)
                throw std::invalid_argument("merge: complexes must be pure of top dimension");
    {
        const ValidationReport r1 = validate(c1);
        if (!r1.ok()) throw std::invalid_argument("merge: first complex invalid: " + r1.summary());
        const ValidationReport r2 = validate(c2);
        if (!r2.ok())
            throw std::invalid_argument("merge: second complex invalid: " + r2.summary());
    }

    MergeResult res;
    res.fatness_before_first = complex_fatness(c1);
    res.fatness_before_second = complex_fatness(c2);
    const double phi0 =
        std::min(res.fatness_before_first.complex_min, res.fatness_before_second.complex_min);
    if (!(phi0 > 0)) throw std::invalid_argument("merge: inputs must have positive fatness");

    // --- Overlap discovery on the original coordinates -------------------
    Complex work = c1;  // the moving copy
    double d2 = 0, eta1 = 0, ball_r = 0;
    std::vector<int> band1, band2;
    std::vector<double> cov1, vol1;
    {
        MergeEngine probe(work, c2, kDefaultTol);
        if (!probe.has_band)
            throw std::invalid_argument("merge: empty overlap, the supports never meet");
        bool all_covered = true;
        for (std::size_t i = 0; i < c2.tops.size() && all_covered; ++i)
            if (probe.covered[1][i] < probe.top_vol[1][i] * (1 - kVolSlack)) all_covered = false;
        if (all_covered) {
            // |c2| is already triangulated by c1 (up to refinement): nothing
            // to do. This also makes re-merging a merge result a no-op.
            res.merged = c1;
            res.fatness_after = res.fatness_before_first;
            res.changed_region = SubcomplexRef{&res.merged, {}};
            return res;
        }
        d2 = probe.max_band_diam;
        // Same convention as the calibration harness: the gap scale is a
        // tenth of the local mesh diameter, so delta * eta1 clearances stay
        // inside the displacement budget.
        eta1 = cfg.eta1 > 0 ? cfg.eta1 : 0.1 * d2;
        ball_r = cfg.ball_radius > 0 ? cfg.ball_radius : 3 * d2;
        band1 = probe.band[0];
        band2 = probe.band[1];
        cov1 = probe.covered[0];
        vol1 = probe.top_vol[0];
    }

    res.schedule_used = displacement_schedule(phi0, d2, n, cfg.delta);
    const DisplacementSchedule& sched = res.schedule_used;

    // --- Transversality sweep over the skeleta of the first complex ------
    std::set<int> moved;
    {
        std::vector<std::vector<int>> star_tops(work.verts.size());
        for (std::size_t t = 0; t < work.tops.size(); ++t)
            for (int v : work.tops[t].v) star_tops[v].push_back(static_cast<int>(t));

        // Vertices on the boundary of the first support may move only when
        // their whole star is buried inside the second support with room to
        // spare; everyone else's star keeps its outline, so the union of the
        // two supports never changes.
        std::set<int> boundary_verts;
        {
            std::map<FaceKey, int> count;
            for (const Simplex& t : work.tops)
                for (const FaceKey& g : facet_keys(t.v)) ++count[g];
            for (const auto& [g, c] : count)
                if (c == 1) boundary_verts.insert(g.begin(), g.end());
        }
        std::vector<SimplexPoints> c2_rim;  // boundary faces of the overlapping c2 tops
        {
            std::map<FaceKey, std::pair<int, int>> count;
            for (std::size_t t = 0; t < c2.tops.size(); ++t)
                for (const FaceKey& g : facet_keys(c2.tops[t].v)) {
                    auto& e = count[g];
                    ++e.first;
                    e.second = static_cast<int>(t);
                }
            const std::set<int> inband2(band2.begin(), band2.end());
            for (const auto& [g, e] : count)
                if (e.first == 1 && inband2.count(e.second)) c2_rim.push_back(c2.points_of(g));
        }
        double total_budget = 0;
        for (double t : sched.t) total_budget += t;

        const std::set<int> pinned(cfg.pinned.begin(), cfg.pinned.end());
        const std::set<int> band1set(band1.begin(), band1.end());
        std::vector<int> movable;
        {
            std::set<int> band_verts;
            for (int t : band1) band_verts.insert(work.tops[t].v.begin(), work.tops[t].v.end());
            for (int v : band_verts) {
                if (pinned.count(v)) continue;
                if (boundary_verts.count(v)) {
                    bool deep = true;
                    for (int t : star_tops[v])
                        if (cov1[t] < vol1[t] * (1 - kVolSlack)) deep = false;
                    if (deep)
                        for (const SimplexPoints& rim : c2_rim)
                            if (point_simplex_distance(work.verts[v], rim) <= 2 * total_budget)
                                deep = false;
                    if (!deep) continue;
                }
                movable.push_back(v);
            }
        }

        std::vector<std::vector<FaceKey>> top2_faces(band2.size());
        std::vector<Bbox> top2_box(band2.size());
        for (std::size_t i = 0; i < band2.size(); ++i) {
            std::set<FaceKey> fs;
            faces_up_to(c2.tops[band2[i]].v, n, fs);
            top2_faces[i].assign(fs.begin(), fs.end());
            top2_box[i] = c2.bbox_of(c2.tops[band2[i]]);
        }
        auto targets_for = [&](const std::set<FaceKey>& keys) {
            std::vector<SimplexPoints> out;
            out.reserve(keys.size());
            for (const FaceKey& f : keys) out.push_back(c2.points_of(f));
            return out;
        };

        std::set<FaceKey> band_faces;
        for (int t : band1) faces_up_to(work.tops[t].v, n - 1, band_faces);

        auto face_clears = [&](const SimplexPoints& fpts, double floor,
                               const std::vector<SimplexPoints>& tgts, double* margin) {
            TransversalityConfig tc;
            tc.delta = floor;
            tc.eta1 = eta1;
            tc.tol = kDefaultTol;
            return transverse_to_all(fpts, tgts, tc, nullptr, margin);
        };
        auto floor_for = [&](int dim, int stage) {
            return dim == stage ? sched.delta_star[stage] : 0.5 * sched.delta_star[dim];
        };

        for (int stage = 0; stage < n; ++stage) {
            std::vector<int> order = movable;
            std::sort(order.begin(), order.end(), [&](int u, int v) {
                if (lex_less(work.verts[u], work.verts[v])) return true;
                if (lex_less(work.verts[v], work.verts[u])) return false;
                return u < v;
            });
            for (int v : order) {
                std::set<FaceKey> through_v;
                for (int t : star_tops[v]) {
                    if (!band1set.count(t)) continue;
                    std::set<FaceKey> fs;
                    faces_up_to(work.tops[t].v, stage, fs);
                    for (const FaceKey& f : fs)
                        if (std::binary_search(f.begin(), f.end(), v)) through_v.insert(f);
                }
                if (through_v.empty()) continue;
                std::set<FaceKey> tkeys;
                for (std::size_t i = 0; i < band2.size(); ++i)
                    if (point_simplex_distance(work.verts[v], c2.points_of(c2.tops[band2[i]].v)) <=
                        ball_r)
                        tkeys.insert(top2_faces[i].begin(), top2_faces[i].end());
                if (tkeys.empty()) continue;
                const std::vector<SimplexPoints> tgts = targets_for(tkeys);

                auto position_ok = [&](double* worst) {
                    double w = std::numeric_limits<double>::infinity(), m = 0;
                    for (const FaceKey& f : through_v) {
                        if (!face_clears(work.points_of(f), floor_for(dim_of(f), stage), tgts,
                                         &m))
                            return false;
                        w = std::min(w, m);
                    }
                    if (worst) *worst = w;
                    return true;
                };
                if (position_ok(nullptr)) continue;

                const Vec home = work.verts[v];
                std::mt19937_64 rng(stream_seed(cfg.seed, stage, v));
                bool accepted = false;
                for (int shell = 0; shell < 8 && !accepted; ++shell) {
                    const double radius = sched.t[stage] * std::pow(0.5, shell);
                    for (int trial = 0; trial < 40 && !accepted; ++trial) {
                        work.verts[v] = home + radius * sample_unit_ball(rng, n);
                        bool good = true;
                        for (int t : star_tops[v]) {
                            const SimplexPoints sp = work.points_of(work.tops[t].v);
                            if (!is_nondegenerate_simplex(sp, kDefaultTol) ||
                                fatness(sp) < phi0 / 2) {
                                good = false;
                                break;
                            }
                        }
                        double w = 0;
                        if (good && position_ok(&w)) {
                            accepted = true;
                            moved.insert(v);
                            res.transcript.push_back({stage, v, home, work.verts[v], w});
                        }
                    }
                }
                if (!accepted) {
                    work.verts[v] = home;
                    throw MergeFailure("merge: sweep stage " + std::to_string(stage) +
                                           " exhausted its displacement budget at vertex " +
                                           std::to_string(v),
                                       res.transcript, FaceKey{v});
                }
            }

            // Replay: the whole skeleton built so far must clear its floors,
            // including faces none of whose vertices could move.
            for (const FaceKey& f : band_faces) {
                if (dim_of(f) > stage) continue;
                const SimplexPoints fpts = work.points_of(f);
                const Bbox fb = Bbox::of(fpts);
                std::set<FaceKey> tkeys;
                for (std::size_t i = 0; i < band2.size(); ++i)
                    if (fb.distance(top2_box[i]) <= ball_r)
                        tkeys.insert(top2_faces[i].begin(), top2_faces[i].end());
                if (tkeys.empty()) continue;
                double m = 0;
                if (!face_clears(fpts, floor_for(dim_of(f), stage), targets_for(tkeys), &m))
                    throw MergeFailure("merge: stage " + std::to_string(stage) +
                                           " replay failed at face " + key_str(f),
                                       res.transcript, f);
            }
        }
    }

    // --- Retriangulation on the final coordinates ------------------------
    try {
        MergeEngine eng(work, c2, kDefaultTol);

        struct Emit {
            SimplexPoints pts;
            bool verbatim;
        };
        std::vector<Emit> emits;
        for (std::size_t t = 0; t < work.tops.size(); ++t) {
            const FaceKey& key = work.tops[t].v;
            bool has_moved = false;
            for (int v : key) has_moved = has_moved || moved.count(v);
            if (!work.bbox_of(work.tops[t]).intersects(eng.band_box, eng.meet_slack())) {
                emits.push_back({work.points_of(key), !has_moved});
                continue;
            }
            const FaceDecomp& d = eng.decomp(0, key);
            if (d.whole) {
                emits.push_back({work.points_of(key), !has_moved});
                continue;
            }
            for (const SimplexPoints& s : d.in) emits.push_back({s, false});
            for (const SimplexPoints& s : d.out) emits.push_back({s, false});
        }
        for (std::size_t t = 0; t < c2.tops.size(); ++t) {
            const FaceKey& key = c2.tops[t].v;
            if (!c2.bbox_of(c2.tops[t]).intersects(eng.band_box, eng.meet_slack())) {
                emits.push_back({c2.points_of(key), true});
                continue;
            }
            const FaceDecomp& d = eng.decomp(1, key);
            if (d.whole) {
                emits.push_back({c2.points_of(key), true});
                continue;
            }
            // The covered part of this top is already tiled by the first
            // side's intersection cells; only the remainder is new ground.
            for (const SimplexPoints& s : d.out) emits.push_back({s, false});
        }

        WeldTable weld(n, 1e-9 * eng.scale());
        for (const Vec& p : work.verts) weld.force_add(p);
        for (const Vec& p : c2.verts) weld.map_point(p);

        std::vector<std::vector<int>> top_ids;
        std::vector<char> top_verbatim;
        std::set<std::vector<int>> seen;
        double dropped_vol = 0;
        for (const Emit& e : emits) {
            std::vector<int> ids;
            ids.reserve(e.pts.size());
            for (const Vec& p : e.pts) ids.push_back(weld.map_point(p));
            std::sort(ids.begin(), ids.end());
            if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
                dropped_vol += simplex_volume(e.pts);  // weld collapsed a sliver
                continue;
            }
            if (!seen.insert(ids).second) continue;
            top_ids.push_back(std::move(ids));
            top_verbatim.push_back(e.verbatim);
        }

        Complex merged;
        merged.ambient = n;
        for (const Vec& p : weld.reps) merged.add_vertex(p);
        std::vector<FaceKey> changed_seeds;
        for (std::size_t i = 0; i < top_ids.size(); ++i) {
            merged.add_top(top_ids[i]);
            if (!top_verbatim[i]) changed_seeds.push_back(merged.tops.back().v);
        }

        // The merged support must be exactly the union of the two inputs.
        double v1 = 0, v2 = 0, vm = 0;
        for (double v : eng.top_vol[0]) v1 += v;
        for (double v : eng.top_vol[1]) v2 += v;
        const double target = v1 + v2 - eng.overlap_vol;
        for (const Simplex& t : merged.tops) vm += simplex_volume(merged.points_of(t));
        if (std::abs(vm - target) > std::max(kVolSlack * target, 1e-12) + dropped_vol)
            throw MergeFailure("merge: merged support volume drifts from the union of the inputs",
                               res.transcript, {});

        const ValidationReport rep = validate(merged);
        if (!rep.ok())
            throw MergeFailure("merge: output failed validation: " + rep.summary(),
                               res.transcript, rep.violations.front().a);

        res.fatness_after = complex_fatness(merged);
        const double floor = cfg.floor_fraction * phi0;
        if (res.fatness_after.complex_min < floor - 1e-12)
            throw MergeFailure("merge: output fatness " +
                                   std::to_string(res.fatness_after.complex_min) +
                                   " fell below the floor " + std::to_string(floor),
                               res.transcript, res.fatness_after.argmin);

        res.merged = std::move(merged);
        res.changed_region = subcomplex_closure(res.merged, changed_seeds);
        return res;
    } catch (MergeFailure& mf) {
        if (mf.transcript.empty() && !res.transcript.empty())
            throw MergeFailure(mf.what(), res.transcript, mf.offending);
        throw;
    }
}

OverlapRegions select_overlap_regions(const Complex& c1, const Complex& c2, const Vec& v0,
                                      double eps, double d1, double d2) {
    if (c1.empty() || c2.empty())
        throw std::invalid_argument("select_overlap_regions: empty complex");
    if (!(eps > 0) || !(d1 >= 0) || !(d2 >= d1))
        throw std::invalid_argument("select_overlap_regions: need eps > 0 and 0 <= d1 <= d2");
    const double meet = 10 * kDefaultTol * std::max(1.0, eps);

    // L2: faces of the fixed complex strictly inside the ball whose
    // clearance to the sphere lies in [d1, d2].
    std::vector<FaceKey> l2seed;
    bool any_inside = false;
    for (const FaceKey& f : c2.face_set()) {
        double far = 0;
        for (const Vec& p : c2.points_of(f)) far = std::max(far, (p - v0).norm());
        if (far >= eps) continue;
        any_inside = true;
        const double clearance = eps - far;
        if (clearance >= d1 && clearance <= d2) l2seed.push_back(f);
    }
    if (!any_inside)
        throw std::invalid_argument(
            "select_overlap_regions: eps too small, the ball reaches no simplex of the fixed "
            "complex");
    if (l2seed.empty())
        throw std::runtime_error(
            "select_overlap_regions: empty overlap, no simplex lands in the distance band");

    OverlapRegions regions;
    regions.L2 = subcomplex_closure(c2, l2seed);

    auto touches = [meet](const SimplexPoints& pts, const Complex& host,
                          const SubcomplexRef& L) {
        const Bbox pb = Bbox::of(pts);
        for (const FaceKey& m : L.members) {
            const SimplexPoints mp = host.points_of(m);
            if (!pb.intersects(Bbox::of(mp), meet)) continue;
            if (simplex_distance(pts, mp) <= meet) return true;
        }
        return false;
    };
    auto inside_ball = [&](const Complex& c, const Simplex& t) {
        for (const Vec& p : c.points_of(t)) {
            if ((p - v0).norm() >= eps) return false;
        }
        return true;
    };

    // M2: L2 plus every face of an inside-ball top of the fixed complex that
    // touches |L2|.
    std::vector<FaceKey> m2seed = l2seed;
    for (const Simplex& t : c2.tops) {
        if (!inside_ball(c2, t)) continue;
        std::set<FaceKey> fs;
        faces_up_to(t.v, t.dim(), fs);
        for (const FaceKey& f : fs)
            if (touches(c2.points_of(f), c2, regions.L2)) m2seed.push_back(f);
    }
    regions.M2 = subcomplex_closure(c2, m2seed);

    // L1: faces of the moving complex within d2 of |L2|.
    std::vector<FaceKey> l1seed;
    for (const FaceKey& f : c1.face_set()) {
        const SimplexPoints pts = c1.points_of(f);
        const Bbox pb = Bbox::of(pts);
        for (const FaceKey& m : regions.L2.members) {
            const SimplexPoints mp = c2.points_of(m);
            if (!pb.intersects(Bbox::of(mp), d2 + meet)) continue;
            if (simplex_distance(pts, mp) <= d2) {
                l1seed.push_back(f);
                break;
            }
        }
    }
    if (l1seed.empty())
        throw std::runtime_error(
            "select_overlap_regions: empty overlap, the moving complex stays clear of the band");
    regions.L1 = subcomplex_closure(c1, l1seed);

    std::vector<FaceKey> m1seed = l1seed;
    for (const Simplex& t : c1.tops) {
        if (!inside_ball(c1, t)) continue;
        std::set<FaceKey> fs;
        faces_up_to(t.v, t.dim(), fs);
        for (const FaceKey& f : fs)
            if (touches(c1.points_of(f), c1, regions.L1)) m1seed.push_back(f);
    }
    regions.M1 = subcomplex_closure(c1, m1seed);
    return regions;
}

SubcomplexRef select_interior_region(const Complex& c, const Complex& collar,
                                     const CollarRegions& regions) {
    if (c.empty() || collar.empty())
        throw std::invalid_argument("select_interior_region: empty complex");
    const int nverts = static_cast<int>(collar.verts.size());

    // Recover the slice width of the collar's layer-major vertex layout: the
    // smallest divisor of the vertex count under which every prism top spans
    // at most two adjacent layers.
    int slice = 0;
    for (int cand = 1; cand <= nverts && slice == 0; ++cand) {
        if (nverts % cand) continue;
        if (nverts / cand < 2) break;
        bool ok = true;
        for (const Simplex& t : collar.tops)
            if (t.v.back() / cand > t.v.front() / cand + 1) {
                ok = false;
                break;
            }
        if (ok) slice = cand;
    }
    if (slice == 0)
        throw std::invalid_argument(
            "select_interior_region: collar lacks the layered vertex layout of "
            "build_prism_complex");
    auto deepest_layer = [slice](const Simplex& t) { return t.v.back() / slice; };

    double diag = 0;
    for (const Complex* cc : {&c, &collar})
        for (const Simplex& t : cc->tops) diag = std::max(diag, cc->bbox_of(t).diag());
    const double meet = 10 * kDefaultTol * std::max(1.0, diag);

    // Layers up to k3 are the collar's own working room; layers up to k2 are
    // ground the collar already covers, so interior tops buried there are
    // redundant.
    std::vector<int> protected_zone, covered_zone;
    for (std::size_t i = 0; i < collar.tops.size(); ++i) {
        const int layer = deepest_layer(collar.tops[i]);
        if (layer <= regions.k3) protected_zone.push_back(static_cast<int>(i));
        if (layer <= regions.k2) covered_zone.push_back(static_cast<int>(i));
    }

    std::vector<int> offenders;
    for (std::size_t ti = 0; ti < c.tops.size(); ++ti) {
        const SimplexPoints pts = c.points_of(c.tops[ti]);
        const Bbox pb = Bbox::of(pts);
        for (int ci : protected_zone) {
            if (!pb.intersects(collar.bbox_of(collar.tops[ci]), meet)) continue;
            if (simplex_distance(pts, collar.points_of(collar.tops[ci])) <= meet) {
                offenders.push_back(static_cast<int>(ti));
                break;
            }
        }
    }
    if (!offenders.empty()) {
        std::string msg =
            "select_interior_region: interior tops reach the protected collar layers (subdivide "
            "them first):";
        for (int i : offenders) msg += " " + std::to_string(i);
        throw std::runtime_error(msg);
    }

    std::vector<FaceKey> keep;
    for (const Simplex& t : c.tops) {
        const SimplexPoints pts = c.points_of(t);
        const Bbox pb = Bbox::of(pts);
        const double vol = simplex_volume(pts);
        double cov = 0;
        for (int ci : covered_zone) {
            if (!pb.intersects(collar.bbox_of(collar.tops[ci]), meet)) continue;
            const auto cell =
                intersect_simplices(pts, collar.points_of(collar.tops[ci]), kDefaultTol);
            if (cell && cell->dim == c.ambient) cov += cell_volume(*cell);
        }
        if (cov < vol * (1 - kVolSlack)) keep.push_back(t.v);
    }
    if (keep.empty())
        throw std::runtime_error(
            "select_interior_region: nothing selected, the collar already covers the interior "
            "triangulation");
    return subcomplex_closure(c, keep);
}

Complex extend_boundary_triangulation(const Complex& boundary, const Complex& interior,
                                      const MergeConfig& cfg) {
    if (boundary.empty())
        throw std::invalid_argument("extend_boundary_triangulation: empty boundary");
    const double phi_b = complex_fatness(boundary).complex_min;
    const double target = cfg.collar_phi > 0 ? cfg.collar_phi : std::min(0.15, 0.5 * phi_b);
    const Complex& gauge = interior.empty() ? boundary : interior;
    double diam_bound = 0;
    for (const Simplex& t : gauge.tops)
        diam_bound = std::max(diam_bound, simplex_diameter(gauge.points_of(t)));
    // Prisms over a boundary simplex are strictly longer than the simplex
    // itself, so when the boundary is its own gauge leave room for height.
    if (interior.empty()) diam_bound *= 2;

    CollarSpec spec;
    try {
        spec = choose_n0(boundary, target, diam_bound);
    } catch (const CollarInfeasible& e) {
        // An explicit target is a hard requirement; the default one backs
        // off to what the probed geometry can actually reach.
        if (cfg.collar_phi > 0 || !(e.best_phi > 0)) throw;
        spec = choose_n0(boundary, 0.9 * e.best_phi, diam_bound);
    }
    if (spec.n0 < 6) spec.n0 = 6;  // collar_regions needs distinct layer marks
    Vec center = Vec::Zero(boundary.ambient);
    for (const Vec& p : boundary.verts) center += p;
    center /= static_cast<double>(boundary.verts.size());
    const Complex collar = build_shrink_collar(boundary, spec, center, cfg.collar_shrink);
    if (interior.empty()) return collar;

    const SubcomplexRef sel = select_interior_region(interior, collar, collar_regions(spec));
    Complex inner;
    inner.ambient = interior.ambient;
    std::map<int, int> remap;
    for (const FaceKey& f : sel.members) {
        if (dim_of(f) != interior.ambient) continue;
        std::vector<int> ids;
        ids.reserve(f.size());
        for (int v : f) {
            auto it = remap.find(v);
            if (it == remap.end()) it = remap.emplace(v, inner.add_vertex(interior.verts[v])).first;
            ids.push_back(it->second);
        }
        inner.add_top(ids);
    }

    MergeConfig merge_cfg = cfg;
    for (int v = 0; v < static_cast<int>(boundary.verts.size()); ++v)
        merge_cfg.pinned.push_back(v);
    MergeResult res = merge_fat_triangulations(collar, inner, merge_cfg);
    return std::move(res.merged);
}

}  // namespace fatmesh

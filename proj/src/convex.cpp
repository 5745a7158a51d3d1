#include "fatmesh/convex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace fatmesh {

namespace {

bool lex_less(const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
}

double spread_of(const std::vector<Vec>& pts) {
    if (pts.empty()) return 1.0;
    return std::max(1.0, Bbox::of(pts).diag());
}

// Enumerate fixed-size index subsets in lexicographic order.
void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
    if (k > n || k < 0) return;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

SimplexPoints ConvexCell::points(const std::vector<int>& face) const {
    SimplexPoints pts;
    pts.reserve(face.size());
    for (int i : face) pts.push_back(verts.at(i));
    return pts;
}

bool ConvexCell::contains(const Vec& x, double tol) const {
    const double scale = spread_of(verts);
    if (hull_distance(hull, x) > tol * scale) return false;
    const Vec y = to_hull_coords(hull, x);
    for (const auto& [g, b] : rows)
        if (g.dot(y) > b + tol * scale) return false;
    return true;
}

ConvexCell cell_from_points(std::vector<Vec> pts, double tol) {
    if (pts.empty()) throw std::invalid_argument("cell_from_points: no points");
    std::sort(pts.begin(), pts.end(), lex_less);
    const double scale = spread_of(pts);

    std::vector<Vec> uniq;
    for (const Vec& p : pts) {
        bool dup = false;
        for (const Vec& q : uniq) dup = dup || (p - q).norm() <= 10 * tol * scale;
        if (!dup) uniq.push_back(p);
    }

    ConvexCell cell;
    cell.verts = uniq;
    cell.hull = affine_hull(uniq, tol);
    cell.dim = cell.hull.dim;
    cell.faces_by_dim.assign(cell.dim + 1, {});

    const int m = static_cast<int>(uniq.size());
    std::vector<int> whole(m);
    for (int i = 0; i < m; ++i) whole[i] = i;
    cell.faces_by_dim[cell.dim].push_back(whole);
    if (cell.dim == 0) return cell;

    // Hull coordinates of every vertex.
    std::vector<Vec> y(m);
    for (int i = 0; i < m; ++i) y[i] = to_hull_coords(cell.hull, uniq[i]);
    const int r = cell.dim;
    const double tols = 1e2 * tol * scale;

    // Scan r-subsets for supporting hyperplanes; key discovered faces by
    // their tight vertex set so each hyperplane appears once.
    std::map<std::vector<int>, std::pair<Vec, double>> exposed;
    for_each_subset(m, r, [&](const std::vector<int>& sub) {
        Mat d(r - 1 > 0 ? r - 1 : 0, r);
        for (int j = 1; j < r; ++j) d.row(j - 1) = (y[sub[j]] - y[sub[0]]).transpose();
        Vec n(r);
        if (r == 1) {
            n << 1.0;
        } else {
            Eigen::JacobiSVD<Mat> svd(d, Eigen::ComputeFullV);
            if (svd.rank() < r - 1) return;  // subset does not span a hyperplane
            n = svd.matrixV().col(r - 1);
        }
        const double b = n.dot(y[sub[0]]);
        double lo = 0, hi = 0;
        for (int i = 0; i < m; ++i) {
            const double s = n.dot(y[i]) - b;
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        Vec g;
        double off;
        if (hi <= tols) {
            g = n;
            off = b;
        } else if (lo >= -tols) {
            g = -n;
            off = -b;
        } else {
            return;  // not supporting
        }
        std::vector<int> tight;
        for (int i = 0; i < m; ++i)
            if (std::abs(g.dot(y[i]) - off) <= tols) tight.push_back(i);
        if (static_cast<int>(tight.size()) == m) return;  // cell is flat against it
        exposed.emplace(tight, std::make_pair(g, off));
    });

    // Drop input points that are not extreme: a hull vertex is tight on a
    // rank-r set of supporting rows, an edge- or facet-interior point is not.
    std::vector<Vec> extreme;
    for (int i = 0; i < m; ++i) {
        std::vector<Vec> tight_normals;
        for (const auto& [t, row] : exposed)
            if (std::abs(row.first.dot(y[i]) - row.second) <= tols)
                tight_normals.push_back(row.first);
        if (static_cast<int>(tight_normals.size()) < r) continue;
        Mat stack(static_cast<int>(tight_normals.size()), r);
        for (int j = 0; j < static_cast<int>(tight_normals.size()); ++j)
            stack.row(j) = tight_normals[j].transpose();
        Eigen::JacobiSVD<Mat> svd(stack);
        if (svd.rank() == r) extreme.push_back(uniq[i]);
    }
    if (extreme.size() < uniq.size()) return cell_from_points(extreme, tol);

    // Meet-closure of the exposed faces gives the full lattice.
    std::set<std::vector<int>> faces;
    for (const auto& [t, row] : exposed) faces.insert(t);
    for (int i = 0; i < m; ++i) faces.insert({i});  // vertices are faces
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<std::vector<int>> cur(faces.begin(), faces.end());
        for (size_t i = 0; i < cur.size(); ++i)
            for (size_t j = i + 1; j < cur.size(); ++j) {
                std::vector<int> meet;
                std::set_intersection(cur[i].begin(), cur[i].end(), cur[j].begin(), cur[j].end(),
                                      std::back_inserter(meet));
                if (!meet.empty() && faces.insert(meet).second) grew = true;
            }
    }

    for (const std::vector<int>& f : faces) {
        SimplexPoints fp;
        for (int i : f) fp.push_back(uniq[i]);
        const int d = affine_rank(fp, tol * scale);
        if (d < cell.dim) cell.faces_by_dim[d].push_back(f);
    }
    for (auto& level : cell.faces_by_dim) std::sort(level.begin(), level.end());

    // Facet half-spaces (tight sets of rank dim-1) feed the inscribed-ball
    // program.
    for (const auto& [t, row] : exposed) {
        SimplexPoints fp;
        for (int i : t) fp.push_back(uniq[i]);
        if (affine_rank(fp, tol * scale) == cell.dim - 1) cell.rows.push_back(row);
    }
    return cell;
}

std::optional<ConvexCell> intersect_simplices(const SimplexPoints& a, const SimplexPoints& b,
                                              double tol) {
    if (a.empty() || b.empty()) return std::nullopt;
    if (a[0].size() != b[0].size())
        throw std::invalid_argument("intersect_simplices: ambient dimension mismatch");
    const double scale = std::max({1.0, simplex_diameter(a), simplex_diameter(b),
                                   (a[0] - b[0]).norm()});
    const double feas = 1e2 * tol * scale;

    auto I = intersect_hulls(affine_hull(a, tol), affine_hull(b, tol), tol);
    if (!I) return std::nullopt;
    const int q = I->dim;

    // Barycentric coordinates of either simplex are affine on the common
    // hull; sample them to recover the half-space rows lambda_i(y) >= 0.
    std::vector<std::pair<Vec, double>> rows;  // g.y <= b
    auto add_simplex_rows = [&](const SimplexPoints& pts) -> bool {
        const Vec bc0 = barycentric_coordinates(pts, I->origin).lambda;
        Mat grad(static_cast<int>(pts.size()), q);
        for (int j = 0; j < q; ++j) {
            Vec bcj = barycentric_coordinates(pts, I->origin + I->basis.col(j)).lambda;
            grad.col(j) = bcj - bc0;
        }
        for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
            Vec g = -grad.row(i).transpose();
            const double nrm = g.norm();
            if (nrm <= 1e-12) {
                if (bc0[i] < -feas) return false;  // constant infeasible row
                continue;
            }
            rows.emplace_back(g / nrm, bc0[i] / nrm);
        }
        return true;
    };
    if (!add_simplex_rows(a) || !add_simplex_rows(b)) return std::nullopt;

    std::vector<Vec> vertices;
    if (q == 0) {
        for (const auto& [g, b] : rows)
            if (-b > feas) return std::nullopt;
        vertices.push_back(I->origin);
    } else {
        const int nrows = static_cast<int>(rows.size());
        for_each_subset(nrows, q, [&](const std::vector<int>& sub) {
            Mat g(q, q);
            Vec rhs(q);
            for (int i = 0; i < q; ++i) {
                g.row(i) = rows[sub[i]].first.transpose();
                rhs[i] = rows[sub[i]].second;
            }
            Eigen::FullPivLU<Mat> lu(g);
            if (lu.rank() < q) return;
            const Vec y = lu.solve(rhs);
            for (const auto& [gr, br] : rows)
                if (gr.dot(y) > br + feas) return;
            vertices.push_back(from_hull_coords(*I, y));
        });
    }
    if (vertices.empty()) return std::nullopt;
    return cell_from_points(vertices, tol);
}

std::pair<Vec, double> chebyshev_point(const ConvexCell& cell) {
    if (cell.dim < 1) throw std::invalid_argument("chebyshev_point: cell has dimension 0");
    const int r = cell.dim;
    const double scale = spread_of(cell.verts);
    const double feas = 1e2 * kDefaultTol * scale;
    const int nrows = static_cast<int>(cell.rows.size());

    Vec best_y;
    double best_rho = -1;
    for_each_subset(nrows, r + 1, [&](const std::vector<int>& sub) {
        // Equality system g.y + rho = b over the chosen rows.
        Mat m(r + 1, r + 1);
        Vec rhs(r + 1);
        for (int i = 0; i <= r; ++i) {
            m.block(i, 0, 1, r) = cell.rows[sub[i]].first.transpose();
            m(i, r) = 1.0;
            rhs[i] = cell.rows[sub[i]].second;
        }
        Eigen::FullPivLU<Mat> lu(m);
        if (lu.rank() < r + 1) return;
        const Vec z = lu.solve(rhs);
        const Vec y = z.head(r);
        const double rho = z[r];
        if (rho < 0) return;
        for (const auto& [g, b] : cell.rows)
            if (g.dot(y) + rho > b + feas) return;
        if (rho > best_rho + 1e-12 * scale ||
            (std::abs(rho - best_rho) <= 1e-12 * scale &&
             std::lexicographical_compare(y.data(), y.data() + r, best_y.data(),
                                          best_y.data() + r))) {
            best_rho = rho;
            best_y = y;
        }
    });

    if (best_rho < 0) {
        // Numerically stuck: fall back to the vertex centroid.
        Vec y = Vec::Zero(r);
        for (const Vec& v : cell.verts) y += to_hull_coords(cell.hull, v);
        y /= static_cast<double>(cell.verts.size());
        double rho = std::numeric_limits<double>::infinity();
        for (const auto& [g, b] : cell.rows) rho = std::min(rho, b - g.dot(y));
        best_y = y;
        best_rho = rho;
    }
    return {from_hull_coords(cell.hull, best_y), best_rho};
}

namespace {

// Facets of `face` within the cell lattice: the (d-1)-faces contained in it.
std::vector<const std::vector<int>*> facets_of(const ConvexCell& cell,
                                               const std::vector<int>& face, int d) {
    std::vector<const std::vector<int>*> out;
    if (d == 0) return out;
    for (const std::vector<int>& g : cell.faces(d - 1))
        if (std::includes(face.begin(), face.end(), g.begin(), g.end())) out.push_back(&g);
    return out;
}

}  // namespace

std::vector<SimplexPoints> subdivide_cell_fat(const ConvexCell& cell) {
    std::map<std::vector<int>, std::vector<SimplexPoints>> tri;
    for (int d = 0; d <= cell.dim; ++d) {
        for (const std::vector<int>& face : cell.faces(d)) {
            if (static_cast<int>(face.size()) == d + 1) {
                tri[face] = {cell.points(face)};
                continue;
            }
            ConvexCell sub = cell_from_points(cell.points(face));
            const Vec apex = chebyshev_point(sub).first;
            std::vector<SimplexPoints> pieces;
            for (const std::vector<int>* g : facets_of(cell, face, d))
                for (const SimplexPoints& s : tri.at(*g)) {
                    SimplexPoints t = s;
                    t.push_back(apex);
                    pieces.push_back(std::move(t));
                }
            tri[face] = std::move(pieces);
        }
    }
    std::vector<int> whole(cell.verts.size());
    for (size_t i = 0; i < cell.verts.size(); ++i) whole[i] = static_cast<int>(i);
    return tri.at(whole);
}

double cell_volume(const ConvexCell& cell) {
    std::map<std::vector<int>, std::vector<SimplexPoints>> tri;
    for (int d = 0; d <= cell.dim; ++d) {
        for (const std::vector<int>& face : cell.faces(d)) {
            if (static_cast<int>(face.size()) == d + 1) {
                tri[face] = {cell.points(face)};
                continue;
            }
            const int v0 = face.front();
            std::vector<SimplexPoints> pieces;
            for (const std::vector<int>* g : facets_of(cell, face, d)) {
                if (std::binary_search(g->begin(), g->end(), v0)) continue;
                for (const SimplexPoints& s : tri.at(*g)) {
                    SimplexPoints t = s;
                    t.push_back(cell.verts[v0]);
                    pieces.push_back(std::move(t));
                }
            }
            tri[face] = std::move(pieces);
        }
    }
    std::vector<int> whole(cell.verts.size());
    for (size_t i = 0; i < cell.verts.size(); ++i) whole[i] = static_cast<int>(i);
    double vol = 0;
    for (const SimplexPoints& s : tri.at(whole)) vol += simplex_volume(s);
    return vol;
}

std::optional<ConvexCell> clip_cell(const ConvexCell& cell, const Vec& n, double c, double tol) {
    const double scale = spread_of(cell.verts);
    const double eps = 10 * tol * scale;
    std::vector<double> h(cell.verts.size());
    bool any_in = false, any_out = false;
    for (size_t i = 0; i < cell.verts.size(); ++i) {
        h[i] = n.dot(cell.verts[i]) - c;
        any_in |= h[i] < -eps;
        any_out |= h[i] > eps;
    }
    if (!any_out) return cell;  // nothing cut away
    if (!any_in) return std::nullopt;

    std::vector<Vec> keep;
    for (size_t i = 0; i < cell.verts.size(); ++i)
        if (h[i] <= eps) keep.push_back(cell.verts[i]);
    if (cell.dim >= 1) {
        for (const std::vector<int>& e : cell.faces(1)) {
            const double hu = h[e[0]], hv = h[e[1]];
            if ((hu < -eps && hv > eps) || (hu > eps && hv < -eps)) {
                const double t = hu / (hu - hv);
                keep.push_back(cell.verts[e[0]] + t * (cell.verts[e[1]] - cell.verts[e[0]]));
            }
        }
    }
    if (keep.empty()) return std::nullopt;
    return cell_from_points(keep, tol);
}

}  // namespace fatmesh

#include "fatmesh/transversal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "fatmesh/calibration.hpp"
#include "fatmesh/convex.hpp"
#include "fatmesh/metrics.hpp"

namespace fatmesh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_config(const TransversalityConfig& cfg) {
    if (!(cfg.delta > 0 && cfg.delta < M_PI / 2))
        throw std::invalid_argument("transversality: delta must lie in (0, pi/2)");
    if (!(cfg.tol > 0)) throw std::invalid_argument("transversality: tolerance must be positive");
}

void check_pair(const SimplexPoints& a, const SimplexPoints& b, double tol) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("transversality: empty simplex");
    if (a.front().size() != b.front().size())
        throw std::invalid_argument("transversality: ambient dimensions differ");
    if (!is_nondegenerate_simplex(a, tol) || !is_nondegenerate_simplex(b, tol))
        throw std::invalid_argument("transversality: degenerate simplex");
}

// eta1 <= 0 requests the intrinsic scale: the smaller diameter.
double effective_eta1(const SimplexPoints& a, const SimplexPoints& b,
                      const TransversalityConfig& cfg) {
    if (cfg.eta1 > 0) return cfg.eta1;
    return std::max(std::min(simplex_diameter(a), simplex_diameter(b)), kDefaultTol);
}

std::vector<int> mask_to_face(unsigned mask) {
    std::vector<int> out;
    for (int i = 0; mask; ++i, mask >>= 1)
        if (mask & 1u) out.push_back(i);
    return out;
}

std::vector<int> full_face(size_t k) {
    std::vector<int> out(k);
    for (size_t i = 0; i < k; ++i) out[i] = static_cast<int>(i);
    return out;
}

// Everything the three clauses need, computed once per pair.
struct PairFacts {
    int expected = 0;        // transverse intersection dimension
    int inter_dim = -1;      // actual; -1 when the pair misses
    bool dim_ok = false;
    double angle = 0.0;      // pi/2 when the clause is vacuous
    double min_gap = kInf;   // closest face pair with dimension sum below n
    unsigned gap_a = 0, gap_b = 0;
    double full_dist = 0.0;  // hull-to-hull distance
};

PairFacts analyze_pair(const SimplexPoints& a, const SimplexPoints& b,
                       const TransversalityConfig& cfg) {
    const int n = static_cast<int>(a.front().size());
    const int k1 = static_cast<int>(a.size()) - 1;
    const int k2 = static_cast<int>(b.size()) - 1;
    PairFacts f;
    f.expected = std::max(0, k1 + k2 - n);

    const auto dist = face_pair_distances(a, b);
    const unsigned full_a = (1u << a.size()) - 1, full_b = (1u << b.size()) - 1;
    f.full_dist = dist[full_a][full_b];
    const double scale =
        std::max({1.0, simplex_diameter(a), simplex_diameter(b), (a[0] - b[0]).norm()});

    if (f.full_dist <= 10 * cfg.tol * scale) {
        auto cell = intersect_simplices(a, b, cfg.tol);
        if (cell) {
            f.inter_dim = cell->dim;
            f.dim_ok = (cell->dim == f.expected);
        } else {
            f.dim_ok = (k1 + k2 < n);  // grazing contact resolved as a miss
        }
    } else {
        f.dim_ok = (k1 + k2 < n);  // pairs too small to force a meeting may miss
    }

    // The angle between the direction spaces, past whatever they share. A
    // full-dimensional simplex leaves no complementary directions to measure,
    // so the clause is vacuous; hulls nested in a lower dimension are flat
    // against each other and fail.
    const AffineHull ha = affine_hull(a, cfg.tol);
    const AffineHull hb = affine_hull(b, cfg.tol);
    if (ha.dim == n || hb.dim == n)
        f.angle = M_PI / 2;
    else
        f.angle = hull_angle(a, b, cfg.tol);

    // Closest pair of faces whose dimensions sum below the ambient dimension.
    for (unsigned ma = 1; ma <= full_a; ++ma)
        for (unsigned mb = 1; mb <= full_b; ++mb) {
            const int dims = __builtin_popcount(ma) + __builtin_popcount(mb) - 2;
            if (dims >= n) continue;
            if (dist[ma][mb] < f.min_gap) {
                f.min_gap = dist[ma][mb];
                f.gap_a = ma;
                f.gap_b = mb;
            }
        }
    return f;
}

void fill_witness(TransversalityWitness* w, int clause, std::vector<int> f1,
                  std::vector<int> f2, double measured, double required,
                  std::string detail) {
    if (!w) return;
    w->clause = clause;
    w->face1 = std::move(f1);
    w->face2 = std::move(f2);
    w->measured = measured;
    w->required = required;
    w->detail = std::move(detail);
}

// Shared clause evaluation; returns true when the pair passes at cfg.delta.
bool judge_pair(const SimplexPoints& a, const SimplexPoints& b, const PairFacts& f,
                const TransversalityConfig& cfg, TransversalityWitness* witness) {
    const double eta1 = effective_eta1(a, b, cfg);
    if (!f.dim_ok) {
        std::ostringstream msg;
        if (f.inter_dim < 0)
            msg << "simplices do not meet but their dimensions force an intersection";
        else
            msg << "intersection has dimension " << f.inter_dim << ", expected " << f.expected;
        fill_witness(witness, 1, full_face(a.size()), full_face(b.size()),
                     static_cast<double>(f.inter_dim), static_cast<double>(f.expected),
                     msg.str());
        return false;
    }
    if (!(cfg.delta < f.angle)) {
        std::ostringstream msg;
        msg << "hull angle " << f.angle << " not above delta " << cfg.delta;
        fill_witness(witness, 2, full_face(a.size()), full_face(b.size()), f.angle, cfg.delta,
                     msg.str());
        return false;
    }
    if (!(f.min_gap > cfg.delta * eta1)) {
        std::ostringstream msg;
        msg << "low-dimensional face pair at distance " << f.min_gap << ", needs more than "
            << cfg.delta * eta1;
        fill_witness(witness, 3, mask_to_face(f.gap_a), mask_to_face(f.gap_b), f.min_gap,
                     cfg.delta * eta1, msg.str());
        return false;
    }
    fill_witness(witness, 0, {}, {}, 0.0, 0.0, "");
    return true;
}

double pair_margin(const SimplexPoints& a, const SimplexPoints& b, const PairFacts& f,
                   const TransversalityConfig& cfg) {
    if (!f.dim_ok) return 0.0;
    const double eta1 = effective_eta1(a, b, cfg);
    return std::max(0.0, std::min(f.angle, f.min_gap / eta1));
}

}  // namespace

bool is_delta_transverse(const SimplexPoints& s1, const SimplexPoints& s2,
                         const TransversalityConfig& cfg, TransversalityWitness* witness) {
    check_config(cfg);
    check_pair(s1, s2, cfg.tol);
    return judge_pair(s1, s2, analyze_pair(s1, s2, cfg), cfg, witness);
}

double transversality_margin(const SimplexPoints& s1, const SimplexPoints& s2,
                             const TransversalityConfig& cfg) {
    check_config(cfg);
    check_pair(s1, s2, cfg.tol);
    return pair_margin(s1, s2, analyze_pair(s1, s2, cfg), cfg);
}

bool transverse_to_all(const SimplexPoints& tau, const std::vector<SimplexPoints>& others,
                       const TransversalityConfig& cfg, TransversalityWitness* witness,
                       double* margin_out) {
    check_config(cfg);
    double overall = M_PI / 2;  // margins are angle levels, capped accordingly
    for (const auto& sigma : others) {
        check_pair(tau, sigma, cfg.tol);
        const PairFacts f = analyze_pair(tau, sigma, cfg);
        const double eta1 = effective_eta1(tau, sigma, cfg);
        const double scale = std::max(
            {1.0, simplex_diameter(tau), simplex_diameter(sigma), (tau[0] - sigma[0]).norm()});
        if (f.full_dist > 10 * cfg.tol * scale) {
            // Disjoint members only need clearance, whatever the dimensions.
            if (!(f.full_dist > cfg.delta * eta1)) {
                std::ostringstream msg;
                msg << "disjoint simplices at distance " << f.full_dist << ", needs more than "
                    << cfg.delta * eta1;
                fill_witness(witness, 3, full_face(tau.size()), full_face(sigma.size()),
                             f.full_dist, cfg.delta * eta1, msg.str());
                if (margin_out) *margin_out = std::min(overall, f.full_dist / eta1);
                return false;
            }
            overall = std::min(overall, f.full_dist / eta1);
        } else {
            if (!judge_pair(tau, sigma, f, cfg, witness)) {
                if (margin_out) *margin_out = std::min(overall, pair_margin(tau, sigma, f, cfg));
                return false;
            }
            overall = std::min(overall, pair_margin(tau, sigma, f, cfg));
        }
    }
    fill_witness(witness, 0, {}, {}, 0.0, 0.0, "");
    if (margin_out) *margin_out = overall;
    return true;
}

PerturbResult perturb_vertex_for_transversality(const Complex& c1, int v0, const Complex& c2,
                                                double eps, const TransversalityConfig& cfg,
                                                std::uint64_t seed) {
    check_config(cfg);
    if (v0 < 0 || v0 >= static_cast<int>(c1.verts.size()))
        throw std::invalid_argument("perturb: vertex index out of range");
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("perturb: eps must lie in (0, 1)");
    if (c1.ambient != c2.ambient)
        throw std::invalid_argument("perturb: ambient dimensions differ");

    // The star of v0 sets the local scales: d1 the largest incident diameter,
    // phi0 the worst incident fatness (of the incoming position).
    std::vector<std::vector<int>> star;
    for (const auto& top : c1.tops)
        if (std::find(top.v.begin(), top.v.end(), v0) != top.v.end()) star.push_back(top.v);
    if (star.empty()) throw std::invalid_argument("perturb: vertex has no incident simplices");

    const Vec origin = c1.verts[v0];
    double d1 = 0.0, phi0 = kInf;
    for (const auto& vs : star) {
        SimplexPoints pts;
        for (int v : vs) pts.push_back(c1.verts[v]);
        d1 = std::max(d1, simplex_diameter(pts));
        phi0 = std::min(phi0, fatness(pts));
    }
    if (!(d1 > 0)) throw std::invalid_argument("perturb: star has zero diameter");

    // The part of the second complex that the move can possibly touch.
    std::vector<SimplexPoints> nearby;
    for (const auto& top : c2.tops) {
        SimplexPoints pts;
        for (int v : top.v) pts.push_back(c2.verts[v]);
        if (point_simplex_distance(origin, pts) <= 2 * d1) nearby.push_back(std::move(pts));
    }

    // Every face of the star through v0 must end up transverse to that part.
    std::set<std::vector<int>> face_set;
    for (const auto& vs : star) {
        const unsigned m = 1u << vs.size();
        for (unsigned mask = 1; mask < m; ++mask) {
            std::vector<int> face;
            for (size_t i = 0; i < vs.size(); ++i)
                if (mask & (1u << i)) face.push_back(vs[i]);
            if (std::find(face.begin(), face.end(), v0) != face.end())
                face_set.insert(std::move(face));
        }
    }

    const double floor =
        delta_star_fn(phi0 > 0 ? phi0 : cfg.delta, cfg.delta, eps);
    TransversalityConfig probe = cfg;
    probe.delta = std::min(floor, cfg.delta);

    std::mt19937_64 rng(seed);
    const int shells = 8, per_shell = 40;
    int trial = 0;
    double best = -kInf;
    for (int j = 0; j < shells; ++j) {
        const double radius = eps * d1 * std::pow(2.0, -j);
        for (int s = 0; s < per_shell + (j == 0 ? 1 : 0); ++s) {
            // Trial zero keeps the current position; later trials sample balls
            // of shrinking radius so accepted moves stay as small as possible.
            const Vec candidate = (j == 0 && s == 0)
                                      ? origin
                                      : Vec(origin + radius * sample_unit_ball(rng, c1.ambient));
            ++trial;

            bool ok = true;
            for (const auto& vs : star) {
                SimplexPoints pts;
                for (int v : vs) pts.push_back(v == v0 ? candidate : c1.verts[v]);
                if (!is_nondegenerate_simplex(pts, cfg.tol) || fatness(pts) < phi0 / 2) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;

            double margin = M_PI / 2;
            for (const auto& face : face_set) {
                SimplexPoints pts;
                for (int v : face) pts.push_back(v == v0 ? candidate : c1.verts[v]);
                double m = 0.0;
                if (!transverse_to_all(pts, nearby, probe, nullptr, &m)) {
                    ok = false;
                    margin = std::min(margin, m);
                    break;
                }
                margin = std::min(margin, m);
            }
            best = std::max(best, margin);
            if (ok && margin > floor)
                return {candidate, (candidate - origin).norm(), margin, trial};
        }
    }
    std::ostringstream msg;
    msg << "perturb: no position within " << eps * d1 << " of vertex " << v0
        << " cleared margin " << floor << " (best " << best << ") in " << trial << " trials";
    throw PerturbationFailure(msg.str(), best, trial);
}

DisplacementSchedule displacement_schedule(double phi0, double d1, int n) {
    return displacement_schedule(phi0, d1, n, 1.0);
}

DisplacementSchedule displacement_schedule(double phi0, double d1, int n, double delta0) {
    if (!(phi0 > 0 && phi0 < 1))
        throw std::invalid_argument("displacement_schedule: fatness must lie in (0, 1)");
    if (!(d1 > 0)) throw std::invalid_argument("displacement_schedule: scale must be positive");
    if (n < 1) throw std::invalid_argument("displacement_schedule: dimension must be positive");
    if (!(delta0 > 0 && delta0 <= 1))
        throw std::invalid_argument("displacement_schedule: delta0 must lie in (0, 1]");

    const CalibrationTables& tab = builtin_calibration();
    DisplacementSchedule s;
    s.d_phi0 = lookup_d_phi0(tab, phi0, n);

    // The displacement caps accumulate mins of the calibrated terms; the
    // margins are bookkept through the ratio t_i / d1 so they do not depend
    // on the scale at all.
    double cap = std::min(0.5, s.d_phi0);
    double ratio = cap / n;
    s.t.push_back(d1 * ratio);
    s.delta_star.push_back(delta_star_fn(phi0, delta0, ratio));
    for (int i = 1; i < n; ++i) {
        const double phi_half = phi0 / 2, prev_half = s.delta_star[i - 1] / 2;
        const double dfn = lookup_delta_fn(tab, phi_half, prev_half);
        s.delta_fn[{phi_half, prev_half}] = dfn;
        cap = std::min(cap, dfn);
        ratio = cap / n;
        s.t.push_back(d1 * ratio);
        s.delta_star.push_back(delta_star_fn(phi0, s.delta_star[i - 1], ratio));
    }
    s.delta_bigstar = 0.5 * *std::min_element(s.delta_star.begin(), s.delta_star.end());
    return s;
}

MapApproxReport approximation_distance(const std::map<int, Vec>& f_vertices,
                                       const std::map<int, Vec>& g_vertices, const Complex& c,
                                       int samples) {
    if (samples < 0)
        throw std::invalid_argument("approximation_distance: sample count must be non-negative");
    MapApproxReport rep;
    std::set<int> used;
    for (const auto& top : c.tops) used.insert(top.v.begin(), top.v.end());
    int image_dim = -1;
    for (int v : used) {
        auto fi = f_vertices.find(v), gi = g_vertices.find(v);
        if (fi == f_vertices.end() || gi == g_vertices.end())
            throw std::invalid_argument("approximation_distance: maps must cover every vertex");
        if (image_dim < 0) image_dim = static_cast<int>(fi->second.size());
        if (fi->second.size() != gi->second.size() ||
            static_cast<int>(fi->second.size()) != image_dim)
            throw std::invalid_argument("approximation_distance: image dimensions differ");
        rep.sup_distance = std::max(rep.sup_distance, (fi->second - gi->second).norm());
    }

    for (const auto& top : c.tops) {
        const int k = static_cast<int>(top.v.size()) - 1;
        // |f - g| is convex on each simplex, so vertices already carry the
        // sup; interior samples only confirm it under refinement.
        for (int s = 0; s < samples; ++s) {
            Eigen::VectorXd lambda = halton_barycentric(s, k + 1);
            Vec diff = Vec::Zero(image_dim);
            for (int i = 0; i <= k; ++i)
                diff += lambda[i] * (f_vertices.at(top.v[i]) - g_vertices.at(top.v[i]));
            rep.sup_distance = std::max(rep.sup_distance, diff.norm());
        }
        if (k < 1) continue;

        // The differentials are constant per simplex: compare the images of
        // hull directions, parametrized by edge coefficients.
        Mat F(image_dim, k), G(image_dim, k);
        for (int i = 1; i <= k; ++i) {
            F.col(i - 1) = f_vertices.at(top.v[i]) - f_vertices.at(top.v[0]);
            G.col(i - 1) = g_vertices.at(top.v[i]) - g_vertices.at(top.v[0]);
        }
        std::vector<Vec> ws;
        for (int i = 0; i < k; ++i) ws.push_back(Vec::Unit(k, i));
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) ws.push_back(Vec::Unit(k, i) - Vec::Unit(k, j));
        for (int s = 0; s < samples; ++s) {
            Vec w = 2.0 * halton_point(s, k) - Vec::Ones(k);
            if (w.norm() > 1e-9) ws.push_back(w);
        }
        for (const Vec& w : ws) {
            const Vec u = F * w, v = G * w;
            const double nu = u.norm(), nv = v.norm();
            if (nu < kDefaultTol && nv < kDefaultTol) continue;
            if (nu < kDefaultTol || nv < kDefaultTol) {
                rep.sup_derivative_angle = std::max(rep.sup_derivative_angle, M_PI / 2);
                continue;
            }
            // Half-angle form: exact zero for equal directions, no precision
            // cliff near 0 or pi.
            const Vec un = u / nu, vn = v / nv;
            const double ang = 2.0 * std::atan2((un - vn).norm(), (un + vn).norm());
            rep.sup_derivative_angle = std::max(rep.sup_derivative_angle, ang);
        }
    }
    rep.subdivision_used = false;
    return rep;
}

}  // namespace fatmesh

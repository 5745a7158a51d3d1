#include "fatmesh/collar.hpp"

#include "fatmesh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace fatmesh {

namespace {

void check_spec(const CollarSpec& spec) {
    if (spec.n0 < 1) throw std::invalid_argument("collar: n0 must be >= 1");
    if (!(spec.depth > 0 && spec.depth <= 1))
        throw std::invalid_argument("collar: depth must lie in (0, 1]");
    if (!(spec.target_phi > 0 && spec.target_phi < 1))
        throw std::invalid_argument("collar: target_phi must lie in (0, 1)");
    if (!(spec.vertical_scale > 0))
        throw std::invalid_argument("collar: vertical_scale must be positive");
}

int layer_count(const CollarSpec& spec) {
    // Snap depth to a whole number of layers; depth <= 1 caps this at n0.
    return std::max(1, static_cast<int>(std::llround(spec.n0 * spec.depth)));
}

// Shared combinatorics of the product triangulation: levels 0..m carry a
// copy of J's vertices (placed by `lift`), and every prism over a top
// simplex is split by the staircase rule into dim+1 simplices.
Complex build_product(const Complex& J, const CollarSpec& spec, int ambient,
                      const std::function<Vec(const Vec&, double)>& lift) {
    check_spec(spec);
    Complex out;
    out.ambient = ambient;
    if (J.empty()) return out;

    const ValidationReport rep = validate(J);
    if (!rep.ok())
        throw std::invalid_argument("collar: boundary complex invalid: " + rep.summary());

    const int n = static_cast<int>(J.verts.size());
    const int m = layer_count(spec);
    const double h = spec.vertical_scale / spec.n0;

    for (int level = 0; level <= m; ++level)
        for (int v = 0; v < n; ++v) out.add_vertex(lift(J.verts[v], level * h));

    for (const Simplex& top : J.tops) {
        const int k = top.dim();
        for (int level = 0; level < m; ++level) {
            const int lo = level * n, hi = (level + 1) * n;
            // Staircase simplex j keeps vertices 0..j on the bottom copy and
            // j..k on the top copy; consecutive j share a common facet.
            for (int j = 0; j <= k; ++j) {
                std::vector<int> ids;
                ids.reserve(k + 2);
                for (int i = 0; i <= j; ++i) ids.push_back(lo + top.v[i]);
                for (int i = j; i <= k; ++i) ids.push_back(hi + top.v[i]);
                out.add_top(std::move(ids));
            }
        }
    }
    return out;
}

}  // namespace

Complex build_prism_complex(const Complex& J, const CollarSpec& spec) {
    return build_product(J, spec, J.ambient + 1, [&](const Vec& p, double t) {
        Vec q(J.ambient + 1);
        q.head(J.ambient) = p;
        q[J.ambient] = t;
        return q;
    });
}

Complex build_shrink_collar(const Complex& J, const CollarSpec& spec, const Vec& center,
                            double shrink) {
    if (center.size() != J.ambient)
        throw std::invalid_argument("build_shrink_collar: center dimension mismatch");
    if (!(shrink > 0))
        throw std::invalid_argument("build_shrink_collar: shrink factor must be positive");
    const int m = layer_count(spec);
    const double top_t = m * spec.vertical_scale / spec.n0;
    if (top_t * shrink >= 1.0)
        throw std::invalid_argument(
            "build_shrink_collar: collar would collapse through the center; lower shrink or "
            "depth");
    return build_product(J, spec, J.ambient, [&](const Vec& p, double t) {
        // The outermost layer is the boundary itself, bitwise; routing it
        // through the center arithmetic would cost an ulp.
        if (t == 0.0) return p;
        return Vec(center + (1.0 - t * shrink) * (p - center));
    });
}

namespace {

struct LayerProbe {
    double phi;       // complex_min of a one-layer collar at this height
    double max_diam;  // largest simplex diameter in that collar
};

LayerProbe probe_layer(const Complex& J, double target_phi, double height) {
    CollarSpec one{1, 1.0, target_phi, height};
    const Complex c = build_prism_complex(J, one);
    LayerProbe p{complex_fatness(c).complex_min, 0.0};
    for (const Simplex& top : c.tops)
        p.max_diam = std::max(p.max_diam, simplex_diameter(c.points_of(top)));
    return p;
}

double median_edge_length(const Complex& J) {
    std::set<FaceKey> edges;
    for (const Simplex& top : J.tops)
        for (const FaceKey& f : faces_of(top.v))
            if (f.size() == 2) edges.insert(f);
    std::vector<double> lengths;
    for (const FaceKey& e : edges) lengths.push_back((J.verts[e[0]] - J.verts[e[1]]).norm());
    if (lengths.empty()) return 1.0;  // point boundary: any scale works
    std::sort(lengths.begin(), lengths.end());
    return lengths[lengths.size() / 2];
}

}  // namespace

CollarSpec choose_n0(const Complex& J, double target_phi, double interior_diam_bound) {
    if (J.empty()) throw std::invalid_argument("choose_n0: boundary complex is empty");
    if (!(target_phi > 0 && target_phi < 1))
        throw std::invalid_argument("choose_n0: target_phi must lie in (0, 1)");
    if (!(interior_diam_bound > 0))
        throw std::invalid_argument("choose_n0: diameter bound must be positive");

    const double med = median_edge_length(J);
    auto probe = [&](double h) { return probe_layer(J, target_phi, h); };

    // Doubling sweep around the median edge length brackets the fatness
    // peak; layer fatness is unimodal in log-height (thin and tall prisms
    // both degrade).
    double best_h = med, best_phi = -1.0;
    for (int t = -16; t <= 16; ++t) {
        const double h = med * std::ldexp(1.0, t);
        const double phi = probe(h).phi;
        if (phi > best_phi) {
            best_phi = phi;
            best_h = h;
        }
    }
    // Bisection (ternary) refinement of the peak.
    double lo = best_h / 2, hi = best_h * 2;
    for (int it = 0; it < 40; ++it) {
        const double h1 = lo + (hi - lo) / 3, h2 = hi - (hi - lo) / 3;
        if (probe(h1).phi < probe(h2).phi)
            lo = h1;
        else
            hi = h2;
    }
    const double peak_h = 0.5 * (lo + hi);
    const double peak_phi = probe(peak_h).phi;
    if (peak_phi > best_phi) {
        best_phi = peak_phi;
        best_h = peak_h;
    }

    if (best_phi < target_phi) {
        std::ostringstream msg;
        msg << "choose_n0: target fatness " << target_phi
            << " is unattainable for this boundary; best achievable is " << best_phi;
        throw CollarInfeasible(msg.str(), best_phi);
    }

    // Diameter shrinks with layer height but is bounded below by the
    // boundary simplices themselves.
    double h_cap = best_h;
    if (probe(h_cap).max_diam > interior_diam_bound) {
        double dlo = best_h / (1 << 16), dhi = best_h;
        if (probe(dlo).max_diam > interior_diam_bound) {
            std::ostringstream msg;
            msg << "choose_n0: diameter bound " << interior_diam_bound
                << " is below the boundary simplices' own diameters";
            throw CollarInfeasible(msg.str(), best_phi);
        }
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (dlo + dhi);
            (probe(mid).max_diam <= interior_diam_bound ? dlo : dhi) = mid;
        }
        h_cap = dlo;
        if (probe(h_cap).phi < target_phi) {
            std::ostringstream msg;
            msg << "choose_n0: fatness " << target_phi << " and diameter bound "
                << interior_diam_bound << " are jointly unattainable; best fatness under the "
                << "bound is " << probe(h_cap).phi;
            throw CollarInfeasible(msg.str(), probe(h_cap).phi);
        }
    }

    // Largest workable layer height: walk up from the peak until fatness or
    // diameter gives out, then bisect the crossing.
    double h_hi = std::min(best_h, h_cap);
    {
        double bad = h_hi;
        bool found_bad = false;
        for (int t = 1; t <= 16 && !found_bad; ++t) {
            bad = h_hi * std::ldexp(1.0, t);
            const LayerProbe p = probe(bad);
            found_bad = p.phi < target_phi || p.max_diam > interior_diam_bound;
        }
        if (found_bad) {
            double glo = h_hi, ghi = bad;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (glo + ghi);
                const LayerProbe p = probe(mid);
                (p.phi >= target_phi && p.max_diam <= interior_diam_bound ? glo : ghi) = mid;
            }
            h_hi = glo;
        } else {
            h_hi = bad;
        }
    }

    // Fewest layers covering a unit-height collar with a workable height; if
    // whole-number reciprocals miss the feasible window, fall back to the
    // peak height and stretch the interval instead.
    constexpr int kMaxLayers = 1 << 16;
    for (int n0 = std::max(1, static_cast<int>(std::ceil(1.0 / h_hi - 1e-12)));
         n0 <= kMaxLayers; ++n0) {
        const double h = 1.0 / n0;
        const LayerProbe p = probe(h);
        if (p.phi >= target_phi && p.max_diam <= interior_diam_bound)
            return CollarSpec{n0, 1.0, target_phi, 1.0};
        if (h < std::min(best_h, h_cap)) break;  // fell below the window
    }
    const double h = std::min(best_h, h_cap);
    const int n0 = std::max(1, static_cast<int>(std::ceil(1.0 / h - 1e-12)));
    if (n0 > kMaxLayers) {
        std::ostringstream msg;
        msg << "choose_n0: unit-height collar would need " << n0 << " layers (cap "
            << kMaxLayers << "); best fatness " << best_phi;
        throw CollarInfeasible(msg.str(), best_phi);
    }
    return CollarSpec{n0, 1.0, target_phi, n0 * h};
}

CollarRegions collar_regions(const CollarSpec& spec) {
    if (spec.n0 < 6)
        throw std::invalid_argument(
            "collar_regions: n0 must be at least 6 for distinct positive regions; raise n0");
    return CollarRegions{5 * spec.n0 / 6, 4 * spec.n0 / 5, 3 * spec.n0 / 4, spec.n0 / 2};
}

}  // namespace fatmesh

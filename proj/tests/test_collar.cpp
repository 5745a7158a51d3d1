#include "doctest.h"

#include "fatmesh/collar.hpp"
#include "fatmesh/metrics.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

using namespace fatmesh;

namespace {

Complex unit_segment() {
    Complex j;
    j.ambient = 1;
    Vec a(1), b(1);
    a << 0.0;
    b << 1.0;
    j.add_vertex(a);
    j.add_vertex(b);
    j.add_top({0, 1});
    return j;
}

Complex regular_polygon_boundary(int sides) {
    Complex j;
    j.ambient = 2;
    for (int i = 0; i < sides; ++i) {
        const double a = 2.0 * M_PI * i / sides;
        j.add_vertex(oracles::vec2(std::cos(a), std::sin(a)));
    }
    for (int i = 0; i < sides; ++i) j.add_top({i, (i + 1) % sides});
    return j;
}

Complex equilateral_complex() {
    Complex j;
    j.ambient = 2;
    for (const Vec& p : oracles::equilateral_triangle()) j.add_vertex(p);
    j.add_top({0, 1, 2});
    return j;
}

double total_volume(const Complex& c) {
    double v = 0;
    for (const Simplex& top : c.tops) v += simplex_volume(c.points_of(top));
    return v;
}

}  // namespace

TEST_CASE("build_prism_complex: segment boundary gives the staircase squares") {
    CollarSpec spec{3, 1.0, 0.1, 1.0};
    Complex collar = build_prism_complex(unit_segment(), spec);
    CHECK(collar.ambient == 2);
    CHECK(collar.verts.size() == 8);  // 2 vertices x 4 levels
    CHECK(collar.tops.size() == 6);   // 3 squares, 2 triangles each
    CHECK(doctest::Approx(total_volume(collar)).epsilon(1e-12) == 1.0);
    CHECK(validate(collar).ok());
    // The realized region is the unit square: every vertex inside it.
    for (const Vec& p : collar.verts) {
        CHECK(p[0] >= -1e-12);
        CHECK(p[0] <= 1 + 1e-12);
        CHECK(p[1] >= -1e-12);
        CHECK(p[1] <= 1 + 1e-12);
    }
}

TEST_CASE("build_prism_complex: one triangle prism splits into three tetrahedra") {
    CollarSpec spec{1, 1.0, 0.1, 0.75};
    Complex j = equilateral_complex();
    Complex collar = build_prism_complex(j, spec);
    CHECK(collar.ambient == 3);
    CHECK(collar.tops.size() == 3);
    const double base = simplex_volume(j.points_of(j.tops[0]));
    CHECK(doctest::Approx(total_volume(collar)).epsilon(1e-12) == base * 0.75);
    CHECK(validate(collar).ok());
}

TEST_CASE("build_prism_complex: empty boundary gives an empty collar") {
    Complex j;
    j.ambient = 2;
    Complex collar = build_prism_complex(j, CollarSpec{4, 1.0, 0.1, 1.0});
    CHECK(collar.empty());
    CHECK(collar.verts.empty());
}

TEST_CASE("build_prism_complex rejects invalid boundaries and bad specs") {
    Complex bad;
    bad.ambient = 2;
    bad.add_vertex(oracles::vec2(0, 0));
    bad.add_vertex(oracles::vec2(1, 0));
    bad.add_vertex(oracles::vec2(2, 0));
    bad.add_top({0, 1, 2});  // collinear: degenerate
    CHECK_THROWS_AS((void)build_prism_complex(bad, CollarSpec{2, 1.0, 0.1, 1.0}),
                    std::invalid_argument);

    Complex j = unit_segment();
    CHECK_THROWS_AS((void)build_prism_complex(j, CollarSpec{0, 1.0, 0.1, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)build_prism_complex(j, CollarSpec{2, 1.5, 0.1, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)build_prism_complex(j, CollarSpec{2, 1.0, 0.1, -1.0}),
                    std::invalid_argument);
}

TEST_CASE("build_prism_complex: horizontal slices are unsubdivided copies of J") {
    Complex j = regular_polygon_boundary(12);
    CollarSpec spec{6, 1.0, 0.1, 0.9};
    Complex collar = build_prism_complex(j, spec);
    CHECK(validate(collar).ok());
    const auto faces = collar.face_set();
    const int n = static_cast<int>(j.verts.size());
    const int m = 6;  // layers at depth 1
    for (int level = 0; level <= m; ++level) {
        for (const Simplex& top : j.tops) {
            FaceKey copy;
            for (int v : top.v) copy.push_back(level * n + v);
            CHECK(faces.count(copy) == 1);
        }
        // Level height is exact: level * (scale / n0), same expression as the
        // builder so the comparison is bitwise.
        const double t = level * (0.9 / 6.0);
        for (int v = 0; v < n; ++v) CHECK(collar.verts[level * n + v][2] == t);
    }
}

TEST_CASE("build_prism_complex: depth builds a proportional slab") {
    Complex j = unit_segment();
    Complex half = build_prism_complex(j, CollarSpec{4, 0.5, 0.1, 1.0});
    CHECK(half.tops.size() == 4);  // 2 of 4 layers
    CHECK(doctest::Approx(total_volume(half)).epsilon(1e-12) == 0.5);
}

TEST_CASE("build_prism_complex: icosahedron surface collar is valid in 4-space") {
    Complex surface = oracles::icosahedron_surface();
    CollarSpec spec{2, 1.0, 0.1, 1.0};
    Complex collar = build_prism_complex(surface, spec);
    CHECK(collar.ambient == 4);
    CHECK(collar.tops.size() == surface.tops.size() * 2 * 3);
    CHECK(validate(collar).ok());
    CHECK(doctest::Approx(total_volume(collar)).epsilon(1e-9) == total_volume(surface) * 1.0);
}

TEST_CASE("fatness is uniform across layers") {
    Complex j = regular_polygon_boundary(8);
    Complex collar = build_prism_complex(j, CollarSpec{5, 1.0, 0.1, 2.0});
    // Group per-top fatness by layer; each layer is a vertical translate of
    // the first, so the sorted fatness lists must agree to round-off. A top's
    // layer is read off its lowest vertex id (levels are id blocks).
    const int n = static_cast<int>(j.verts.size());
    std::vector<std::vector<double>> layers(5);
    for (const Simplex& top : collar.tops)
        layers[top.v.front() / n].push_back(fatness(collar.points_of(top)));
    for (auto& l : layers) std::sort(l.begin(), l.end());
    for (int l = 1; l < 5; ++l)
        for (size_t i = 0; i < layers[0].size(); ++i)
            CHECK(doctest::Approx(layers[l][i]).epsilon(1e-12) == layers[0][i]);
}

TEST_CASE("choose_n0: easy target on an equilateral boundary needs one layer") {
    CollarSpec spec = choose_n0(equilateral_complex(), 0.05, 10.0);
    CHECK(spec.n0 == 1);
    CHECK(spec.vertical_scale == 1.0);
    Complex collar = build_prism_complex(equilateral_complex(), spec);
    CHECK(complex_fatness(collar).complex_min >= 0.05);
}

TEST_CASE("choose_n0: returned spec meets its own post-condition") {
    Complex j = regular_polygon_boundary(12);
    CollarSpec spec = choose_n0(j, 0.2, 10.0);
    Complex collar = build_prism_complex(j, spec);
    CHECK(complex_fatness(collar).complex_min >= 0.2);
    double max_diam = 0;
    for (const Simplex& top : collar.tops)
        max_diam = std::max(max_diam, simplex_diameter(collar.points_of(top)));
    CHECK(max_diam <= 10.0);
}

TEST_CASE("choose_n0: diameter bound forces thinner layers") {
    Complex j = regular_polygon_boundary(12);
    const double edge = (j.verts[1] - j.verts[0]).norm();
    // Bound just above the boundary edge length: layers must be much thinner
    // than the fatness-optimal aspect, but a spec still exists for a low phi.
    CollarSpec spec = choose_n0(j, 0.05, edge * 1.05);
    Complex collar = build_prism_complex(j, spec);
    double max_diam = 0;
    for (const Simplex& top : collar.tops)
        max_diam = std::max(max_diam, simplex_diameter(collar.points_of(top)));
    CHECK(max_diam <= edge * 1.05);
    CHECK(complex_fatness(collar).complex_min >= 0.05);
}

TEST_CASE("choose_n0: unattainable fatness reports the best achievable value") {
    // A square prism over a segment splits into right triangles whose
    // fatness peaks at 1/4 (legs equal); 0.3 can never be reached.
    CHECK_THROWS_AS((void)choose_n0(unit_segment(), 0.3, 10.0), CollarInfeasible);
    try {
        (void)choose_n0(unit_segment(), 0.3, 10.0);
    } catch (const CollarInfeasible& e) {
        CHECK(doctest::Approx(e.best_phi).epsilon(1e-6) == 0.25);
    }

    // No staircase simplex anywhere gets near 0.99.
    CHECK_THROWS_AS((void)choose_n0(regular_polygon_boundary(6), 0.99, 10.0), CollarInfeasible);
}

TEST_CASE("choose_n0 rejects empty boundaries and bad arguments") {
    Complex empty;
    empty.ambient = 2;
    CHECK_THROWS_AS((void)choose_n0(empty, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)choose_n0(unit_segment(), 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)choose_n0(unit_segment(), 0.1, -1.0), std::invalid_argument);
}

TEST_CASE("collar_regions: floor formulas and the n0 guard") {
    CollarRegions r30 = collar_regions(CollarSpec{30, 1.0, 0.1, 1.0});
    CHECK(r30.k1 == 25);
    CHECK(r30.k2 == 24);
    CHECK(r30.k3 == 22);
    CHECK(r30.k4 == 15);

    CollarRegions r6 = collar_regions(CollarSpec{6, 1.0, 0.1, 1.0});
    CHECK(r6.k1 == 5);
    CHECK(r6.k2 == 4);
    CHECK(r6.k3 == 4);
    CHECK(r6.k4 == 3);

    CHECK_THROWS_AS((void)collar_regions(CollarSpec{5, 1.0, 0.1, 1.0}), std::invalid_argument);

    // Ordering invariant across a range of sizes.
    for (int n0 = 6; n0 <= 200; ++n0) {
        CollarRegions r = collar_regions(CollarSpec{n0, 1.0, 0.1, 1.0});
        CHECK(r.k4 <= r.k3);
        CHECK(r.k3 <= r.k2);
        CHECK(r.k2 <= r.k1);
        CHECK(r.k1 < n0);
        CHECK(r.k4 >= 1);
    }
}

TEST_CASE("build_shrink_collar: rings of a polygon boundary stay in the plane") {
    Complex j = regular_polygon_boundary(12);
    CollarSpec spec{6, 1.0, 0.2, 1.0};
    Vec center = oracles::vec2(0, 0);
    Complex collar = build_shrink_collar(j, spec, center, 0.5);
    CHECK(collar.ambient == 2);
    CHECK(validate(collar).ok());
    CHECK(collar.tops.size() == 12 * 6 * 2);
    // Outermost ring is the boundary itself; innermost sits at radius 1/2.
    const int n = 12;
    for (int v = 0; v < n; ++v) {
        CHECK((collar.verts[v] - j.verts[v]).norm() < 1e-15);
        CHECK(doctest::Approx(collar.verts[6 * n + v].norm()).epsilon(1e-12) == 0.5);
    }
    // Covered area equals the annulus between the two polygon rings.
    const double full = std::abs(oracles::shoelace_area(
        std::vector<Vec>(j.verts.begin(), j.verts.end())));
    CHECK(doctest::Approx(total_volume(collar)).epsilon(1e-9) == full * (1.0 - 0.25));

    // A shrink rate that would pass through the center is rejected.
    CHECK_THROWS_AS((void)build_shrink_collar(j, spec, center, 1.1), std::invalid_argument);
}

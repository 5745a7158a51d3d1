#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "fatmesh/calibration.hpp"
#include "fatmesh/metrics.hpp"
#include "fatmesh/transversal.hpp"
#include "oracles.hpp"

using namespace fatmesh;
using oracles::vec2;
using oracles::vec3;

namespace {

TransversalityConfig level(double delta, double eta1 = 0.1) {
    TransversalityConfig cfg;
    cfg.delta = delta;
    cfg.eta1 = eta1;
    return cfg;
}

// One triangle in the plane whose first vertex is the one to move.
Complex single_triangle(const Vec& v0, const Vec& v1, const Vec& v2c) {
    Complex c;
    c.ambient = 2;
    int a = c.add_vertex(v0), b = c.add_vertex(v1), d = c.add_vertex(v2c);
    c.add_top({a, b, d});
    return c;
}

}  // namespace

TEST_CASE("crossing unit segments pass at delta 0.5") {
    SimplexPoints s1{vec2(-0.5, 0), vec2(0.5, 0)};
    SimplexPoints s2{vec2(0, -0.5), vec2(0, 0.5)};
    TransversalityWitness w;
    CHECK(is_delta_transverse(s1, s2, level(0.5), &w));
    CHECK(w.clause == 0);
    // The crossing is orthogonal, so the margin is the right angle itself:
    // the face-distance clause only sees the far-away endpoints.
    CHECK(transversality_margin(s1, s2, level(0.5)) == doctest::Approx(M_PI / 2));
}

TEST_CASE("parallel segments fail the dimension clause") {
    SimplexPoints s1{vec2(-0.5, 0), vec2(0.5, 0)};
    SimplexPoints s2{vec2(-0.5, 0.1), vec2(0.5, 0.1)};
    TransversalityWitness w;
    CHECK_FALSE(is_delta_transverse(s1, s2, level(0.5), &w));
    CHECK(w.clause == 1);
    CHECK(transversality_margin(s1, s2, level(0.5)) == 0.0);
}

TEST_CASE("segment piercing a triangle at 45 degrees passes in 3-space") {
    SimplexPoints tri{vec3(-1, -1, 0), vec3(1.5, -1, 0), vec3(0, 1.5, 0)};
    const double c = std::sqrt(0.5);
    SimplexPoints seg{vec3(0.1 - 0.35 * c, -0.2, -0.35 * c),
                      vec3(0.1 + 0.35 * c, -0.2, 0.35 * c)};
    TransversalityWitness w;
    CHECK(is_delta_transverse(tri, seg, level(0.5), &w));
    CHECK(w.clause == 0);
    // The hull angle (45 degrees) is the binding part of the margin here.
    CHECK(transversality_margin(tri, seg, level(0.5)) == doctest::Approx(M_PI / 4));
}

TEST_CASE("vertex resting on a segment fails the distance clause") {
    // In the plane a point and a segment cannot transversally meet: the pair
    // only passes by staying apart, which contact violates.
    SimplexPoints pt{vec2(0, 0)};
    SimplexPoints seg{vec2(-0.5, 0), vec2(0.5, 0)};
    TransversalityWitness w;
    CHECK_FALSE(is_delta_transverse(pt, seg, level(0.3), &w));
    CHECK(w.clause == 3);
    // Far enough away the same pair passes.
    SimplexPoints far{vec2(0, 0.2)};
    CHECK(is_delta_transverse(far, seg, level(0.3)));
}

TEST_CASE("coplanar triangles in 3-space fail the angle clause") {
    // Meeting along a shared segment of their boundary edges matches the
    // expected intersection dimension, but the hulls are flat against each
    // other, so no positive angle floor can hold.
    SimplexPoints t1{vec3(0, 0, 0), vec3(1, 0, 0), vec3(0.5, 1, 0)};
    SimplexPoints t2{vec3(0.2, 0, 0), vec3(1.2, 0, 0), vec3(0.7, -1, 0)};
    TransversalityWitness w;
    bool ok = is_delta_transverse(t1, t2, level(0.2), &w);
    CHECK_FALSE(ok);
    CHECK(w.clause == 2);
    CHECK(w.measured == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("ambient mismatch and degenerate input are rejected") {
    SimplexPoints flat2{vec2(0, 0), vec2(1, 0)};
    SimplexPoints flat3{vec3(0, 0, 0), vec3(1, 0, 0)};
    CHECK_THROWS_AS(is_delta_transverse(flat2, flat3, level(0.3)), std::invalid_argument);
    SimplexPoints degen{vec2(0, 0), vec2(1, 0), vec2(2, 0)};
    CHECK_THROWS_AS(is_delta_transverse(degen, flat2, level(0.3)), std::invalid_argument);
    TransversalityConfig bad = level(2.0);  // above pi/2
    CHECK_THROWS_AS(is_delta_transverse(flat2, flat2, bad), std::invalid_argument);
}

TEST_CASE("predicate is symmetric and monotone in delta") {
    std::mt19937_64 rng(91);
    int checked = 0;
    for (int i = 0; i < 80; ++i) {
        SimplexPoints a = random_fat_simplex(rng, 2, 0.1);
        SimplexPoints b = random_fat_simplex(rng, 2, 0.1);
        for (auto& p : b) p = 1.4 * p + 0.15 * sample_unit_ball(rng, 2);
        const auto cfg = level(0.3);
        CHECK(is_delta_transverse(a, b, cfg) == is_delta_transverse(b, a, cfg));
        if (is_delta_transverse(a, b, cfg)) {
            ++checked;
            CHECK(is_delta_transverse(a, b, level(0.15)));
            CHECK(is_delta_transverse(a, b, level(0.02)));
        }
    }
    CHECK(checked > 10);  // the family must actually exercise the property
}

TEST_CASE("transverse_to_all demands clearance from disjoint members") {
    SimplexPoints tau{vec2(0, 0), vec2(1, 0), vec2(0, 1)};
    // 0.02 from tau's corner: within delta * eta1 = 0.03 without touching.
    SimplexPoints near_by{vec2(1.02, 0.0), vec2(2, 0.2), vec2(1.5, 1.2)};
    SimplexPoints far{vec2(5, 5), vec2(6, 5), vec2(5, 6)};
    TransversalityWitness w;
    double margin = 0;
    CHECK_FALSE(transverse_to_all(tau, {near_by, far}, level(0.3), &w, &margin));
    CHECK(w.clause == 3);
    CHECK(transverse_to_all(tau, {far}, level(0.3), &w, &margin));
    CHECK(margin > 0.3);
}

TEST_CASE("perturbation accepts a vertex already in general position at zero displacement") {
    Complex c1 = single_triangle(vec2(10, 10), vec2(11, 10), vec2(10, 11));
    Complex c2 = single_triangle(vec2(0, 0), vec2(1, 0), vec2(0, 1));
    auto res = perturb_vertex_for_transversality(c1, 0, c2, 0.2, level(0.3), 42);
    CHECK(res.displacement == 0.0);
    CHECK(res.trials_used == 1);
    CHECK(res.position == c1.verts[0]);
}

TEST_CASE("perturbation pulls a vertex off a simplex of the other complex") {
    // The moving vertex starts exactly on an edge of the fixed triangle.
    Complex c1 = single_triangle(vec2(0.0, 0.5), vec2(-1.0, 0.0), vec2(-1.0, 1.0));
    Complex c2 = single_triangle(vec2(0.0, -0.2), vec2(0.0, 1.2), vec2(1.2, 0.5));
    const auto cfg = level(0.3);
    const double eps = 0.2;
    auto res = perturb_vertex_for_transversality(c1, 0, c2, eps, cfg, 42);

    // Displacement bound: strictly inside the eps ball around the start.
    SimplexPoints star{c1.verts[0], c1.verts[1], c1.verts[2]};
    const double d1 = simplex_diameter(star);
    const double phi0 = fatness(star);
    CHECK(res.displacement > 0.0);
    CHECK(res.displacement < eps * d1);

    // Post-condition replay: every face through the moved vertex passes the
    // predicate against the nearby part of c2 at the reported margin.
    Complex moved = c1;
    moved.verts[0] = res.position;
    std::vector<SimplexPoints> l2{{c2.verts[0], c2.verts[1], c2.verts[2]}};
    const double floor = delta_star_fn(phi0, cfg.delta, eps);
    CHECK(res.delta_star > floor);
    TransversalityConfig probe = cfg;
    probe.delta = floor;
    for (const std::vector<int>& face :
         {std::vector<int>{0}, {0, 1}, {0, 2}, {0, 1, 2}}) {
        SimplexPoints pts;
        for (int v : face) pts.push_back(moved.verts[v]);
        double margin = 0;
        CHECK(transverse_to_all(pts, l2, probe, nullptr, &margin));
        CHECK(margin >= res.delta_star);
    }
    // Fatness floor on the star.
    SimplexPoints new_star{moved.verts[0], moved.verts[1], moved.verts[2]};
    CHECK(fatness(new_star) >= phi0 / 2);
}

TEST_CASE("perturbation is deterministic per seed; different seeds both satisfy the contract") {
    Complex c1 = single_triangle(vec2(0.0, 0.5), vec2(-1.0, 0.0), vec2(-1.0, 1.0));
    Complex c2 = single_triangle(vec2(0.0, -0.2), vec2(0.0, 1.2), vec2(1.2, 0.5));
    const auto cfg = level(0.3);
    auto ra = perturb_vertex_for_transversality(c1, 0, c2, 0.2, cfg, 7);
    auto rb = perturb_vertex_for_transversality(c1, 0, c2, 0.2, cfg, 7);
    CHECK(ra.position == rb.position);
    CHECK(ra.trials_used == rb.trials_used);
    auto rc = perturb_vertex_for_transversality(c1, 0, c2, 0.2, cfg, 8);
    SimplexPoints star{c1.verts[0], c1.verts[1], c1.verts[2]};
    const double budget = 0.2 * simplex_diameter(star);
    CHECK(ra.displacement < budget);
    CHECK(rc.displacement < budget);
    CHECK(rc.delta_star > 0);
}

TEST_CASE("perturbation keeps the fatness floor on randomized stars") {
    // Random fans around a center vertex, fixed complex nearby; the accepted
    // position must keep every incident simplex at half its starting floor.
    std::mt19937_64 rng(314);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + static_cast<int>(trial % 2);
        Complex c1;
        c1.ambient = n;
        const int hub = c1.add_vertex(Vec::Zero(n));
        std::vector<int> ring;
        for (int i = 0; i < n + 1; ++i) {
            Vec p = sample_unit_sphere(rng, n);
            ring.push_back(c1.add_vertex(p));
        }
        std::vector<int> top{hub};
        for (int i = 0; i < n; ++i) top.push_back(ring[i]);
        SimplexPoints pts;
        for (int v : top) pts.push_back(c1.verts[v]);
        if (!is_nondegenerate_simplex(pts, kDefaultTol) || fatness(pts) < 0.02) continue;
        c1.add_top(top);

        Complex c2;
        c2.ambient = n;
        std::vector<int> other;
        for (int i = 0; i <= n; ++i)
            other.push_back(c2.add_vertex(0.8 * sample_unit_sphere(rng, n)));
        SimplexPoints opts;
        for (int v : other) opts.push_back(c2.verts[v]);
        if (!is_nondegenerate_simplex(opts, kDefaultTol)) continue;
        c2.add_top(other);

        const double phi0 = fatness(pts);
        try {
            auto res = perturb_vertex_for_transversality(c1, hub, c2, 0.3, level(0.2), 99 + trial);
            SimplexPoints after = pts;
            after[0] = res.position;
            CHECK(fatness(after) >= phi0 / 2);
        } catch (const PerturbationFailure& e) {
            // Honest failure carries diagnostics rather than a bad position.
            CHECK(e.trials > 0);
        }
    }
}

TEST_CASE("displacement schedule follows the calibrated opening step") {
    const auto& tab = builtin_calibration();
    auto s = displacement_schedule(0.4, 1.0, 2);
    const double d = lookup_d_phi0(tab, 0.4, 2);
    CHECK(s.d_phi0 == d);
    CHECK(s.t[0] == (1.0 / 2) * std::min(0.5, d));
    CHECK(s.t.size() == 2);
    CHECK(s.delta_star.size() == 2);
    CHECK(s.delta_fn.size() == 1);
}

TEST_CASE("displacement schedule is non-increasing, positive, and halves the worst margin") {
    for (double phi0 : {0.05, 0.2, 0.4}) {
        for (int n : {2, 3, 4}) {
            auto s = displacement_schedule(phi0, 2.5, n);
            REQUIRE(static_cast<int>(s.t.size()) == n);
            for (int i = 1; i < n; ++i) CHECK(s.t[i] <= s.t[i - 1]);  // exact
            double worst = s.delta_star[0];
            for (double ds : s.delta_star) {
                CHECK(ds > 0);
                worst = std::min(worst, ds);
            }
            for (double t : s.t) CHECK(t > 0);
            CHECK(s.delta_bigstar == 0.5 * worst);
            for (double ds : s.delta_star) CHECK(s.delta_bigstar <= 0.5 * ds);
        }
    }
}

TEST_CASE("displacement schedule scales linearly in the length scale") {
    auto base = displacement_schedule(0.3, 1.0, 3);
    auto scaled = displacement_schedule(0.3, 3.75, 3);
    for (size_t i = 0; i < base.t.size(); ++i) {
        CHECK(scaled.t[i] == doctest::Approx(3.75 * base.t[i]).epsilon(1e-12));
        // Margins are angles: identical, not merely close.
        CHECK(scaled.delta_star[i] == base.delta_star[i]);
    }
    CHECK(scaled.delta_bigstar == base.delta_bigstar);
}

TEST_CASE("displacement schedule threads the starting margin through the cascade") {
    // The three-argument form is the unit starting margin, bitwise.
    const auto unit = displacement_schedule(0.3, 2.0, 3);
    const auto explicit_unit = displacement_schedule(0.3, 2.0, 3, 1.0);
    REQUIRE(unit.t.size() == explicit_unit.t.size());
    for (size_t i = 0; i < unit.t.size(); ++i) {
        CHECK(unit.t[i] == explicit_unit.t[i]);
        CHECK(unit.delta_star[i] == explicit_unit.delta_star[i]);
    }
    CHECK(unit.delta_bigstar == explicit_unit.delta_bigstar);

    // The opening displacement cap ignores the margin; the opening margin is
    // linear in it (the stage-zero displacement ratio is margin-free).
    const auto half = displacement_schedule(0.3, 2.0, 3, 0.5);
    const auto quarter = displacement_schedule(0.3, 2.0, 3, 0.25);
    CHECK(half.t[0] == unit.t[0]);
    CHECK(quarter.t[0] == unit.t[0]);
    CHECK(half.delta_star[0] == 0.5 * unit.delta_star[0]);
    CHECK(quarter.delta_star[0] == 0.25 * unit.delta_star[0]);
    // Later stages stay ordered by the starting margin.
    for (size_t i = 0; i < unit.t.size(); ++i) {
        CHECK(half.delta_star[i] <= unit.delta_star[i]);
        CHECK(quarter.delta_star[i] <= half.delta_star[i]);
        CHECK(half.t[i] <= unit.t[i]);
    }

    CHECK_THROWS_AS(displacement_schedule(0.3, 2.0, 3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(displacement_schedule(0.3, 2.0, 3, -0.2), std::invalid_argument);
    CHECK_THROWS_AS(displacement_schedule(0.3, 2.0, 3, 1.5), std::invalid_argument);
}

TEST_CASE("approximation distance: identical, translated, rotated maps") {
    Complex c;
    c.ambient = 2;
    int a = c.add_vertex(vec2(0, 0)), b = c.add_vertex(vec2(1, 0)), d = c.add_vertex(vec2(0, 1));
    c.add_top({a, b, d});
    std::map<int, Vec> f{{a, vec2(0, 0)}, {b, vec2(1, 0)}, {d, vec2(0, 1)}};

    auto same = approximation_distance(f, f, c, 32);
    CHECK(same.sup_distance == 0.0);
    CHECK(same.sup_derivative_angle == 0.0);
    CHECK_FALSE(same.subdivision_used);

    std::map<int, Vec> g;
    const Vec shift = vec2(0.06, 0.08);  // length 0.1
    for (const auto& [v, p] : f) g[v] = p + shift;
    auto moved = approximation_distance(f, g, c, 32);
    CHECK(moved.sup_distance == doctest::Approx(0.1).epsilon(1e-12));
    // Translated vertex positions reproduce the differentials only up to
    // floating-point rounding of the shifted coordinates.
    CHECK(moved.sup_derivative_angle <= 1e-12);

    const double theta = 0.3;
    Eigen::Matrix2d rot;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    std::map<int, Vec> h;
    for (const auto& [v, p] : f) h[v] = rot * p;
    auto turned = approximation_distance(f, h, c, 64);
    CHECK(turned.sup_derivative_angle == doctest::Approx(theta).epsilon(1e-9));
}

TEST_CASE("approximation distance sups are monotone under sample refinement") {
    Complex c;
    c.ambient = 2;
    int a = c.add_vertex(vec2(0, 0)), b = c.add_vertex(vec2(1, 0)), d = c.add_vertex(vec2(0, 1));
    c.add_top({a, b, d});
    std::map<int, Vec> f{{a, vec2(0, 0)}, {b, vec2(1, 0)}, {d, vec2(0, 1)}};
    std::map<int, Vec> g{{a, vec2(0.02, 0)}, {b, vec2(1, 0.05)}, {d, vec2(-0.03, 0.98)}};
    double last_dist = -1, last_ang = -1;
    for (int samples : {0, 8, 64, 256}) {
        auto rep = approximation_distance(f, g, c, samples);
        CHECK(rep.sup_distance >= last_dist);
        CHECK(rep.sup_derivative_angle >= last_ang);
        last_dist = rep.sup_distance;
        last_ang = rep.sup_derivative_angle;
    }
    CHECK_THROWS_AS(approximation_distance(f, {{a, vec2(0, 0)}}, c, 4), std::invalid_argument);
}

// --- calibrated constants ---------------------------------------------------

TEST_CASE("largest attainable fatness matches the regular simplex") {
    CHECK(max_simplex_fatness(2) == doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-12));
    CHECK(max_simplex_fatness(3) == doctest::Approx(std::sqrt(2.0) / 12).epsilon(1e-12));
    CHECK(max_simplex_fatness(4) == doctest::Approx(std::sqrt(5.0) / 96).epsilon(1e-12));
    // Cross-check the closed form against the fatness of explicit regular
    // simplices (the oracle recomputes volumes from squared distances).
    CHECK(fatness(oracles::equilateral_triangle()) == doctest::Approx(max_simplex_fatness(2)));
    SimplexPoints tet = oracles::regular_tetrahedron();
    for (auto& p : tet) p /= simplex_diameter(tet);
    CHECK(fatness(tet) == doctest::Approx(max_simplex_fatness(3)));
    CHECK(oracles::cayley_menger_volume(tet) == doctest::Approx(std::sqrt(2.0) / 12));
}

TEST_CASE("random fat simplices hit their target fatness at unit diameter") {
    std::mt19937_64 rng(5);
    for (int n : {2, 3, 4}) {
        for (double target : {0.02, 0.1, 0.3}) {
            if (target > 0.999 * max_simplex_fatness(n)) {
                CHECK(random_fat_simplex(rng, n, target).empty());
                continue;
            }
            auto s = random_fat_simplex(rng, n, target);
            REQUIRE(s.size() == static_cast<size_t>(n + 1));
            CHECK(simplex_diameter(s) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(fatness(s) >= target);
            CHECK(fatness(s) <= 1.1 * target);
            CHECK(oracles::brute_force_fatness(s) == doctest::Approx(fatness(s)).epsilon(1e-9));
        }
    }
}

TEST_CASE("calibration tables are monotone, floored, and reproducible") {
    auto tab = run_calibration(60, 2026);
    // Monotone non-decreasing displacement along the fatness axis, per dim.
    std::map<int, double> prev;
    for (const auto& row : tab.d_rows) {
        auto it = prev.find(row.n);
        if (it != prev.end()) CHECK(row.d >= it->second);
        prev[row.n] = row.d;
        CHECK(row.d <= 0.5);
    }
    std::map<double, double> prev_delta;
    for (const auto& row : tab.delta_rows) {
        auto it = prev_delta.find(row.delta);
        if (it != prev_delta.end()) CHECK(row.d >= it->second);
        prev_delta[row.delta] = row.d;
    }
    // Lookups respect the analytic floors and the cap.
    CHECK(lookup_d_phi0(tab, 0.001, 2) >= 0.001 / 8);
    CHECK(lookup_d_phi0(tab, 0.4, 2) <= 0.5);
    CHECK(lookup_delta_fn(tab, 0.001, 0.3) >= 0.3 * 0.001 / 16);
    CHECK(lookup_delta_fn(tab, 0.2, 0.4) <= 0.5);
    // Same seed, same tables, bit for bit.
    auto again = run_calibration(60, 2026);
    CHECK(to_csv_d(tab) == to_csv_d(again));
    CHECK(to_csv_delta(tab) == to_csv_delta(again));
    CHECK(tab.version_hash() == again.version_hash());
}

TEST_CASE("calibration CSV round-trips and hashes its contents") {
    auto tab = run_calibration(20, 77);
    auto back = from_csv(to_csv_d(tab), to_csv_delta(tab));
    CHECK(back.version_hash() == tab.version_hash());
    REQUIRE(back.d_rows.size() == tab.d_rows.size());
    for (size_t i = 0; i < back.d_rows.size(); ++i) {
        CHECK(back.d_rows[i].phi0 == tab.d_rows[i].phi0);
        CHECK(back.d_rows[i].n == tab.d_rows[i].n);
        CHECK(back.d_rows[i].d == tab.d_rows[i].d);
    }
    // Any change to a row changes the hash.
    auto bent = tab;
    bent.d_rows[0].d += 1e-9;
    CHECK(bent.version_hash() != tab.version_hash());
    CHECK_THROWS_AS(from_csv("nope\n", to_csv_delta(tab)), std::runtime_error);
}

TEST_CASE("builtin calibration lookups feed the schedule sensibly") {
    const auto& tab = builtin_calibration();
    CHECK_FALSE(tab.d_rows.empty());
    CHECK_FALSE(tab.delta_rows.empty());
    CHECK(tab.version_hash().size() == 16);
    // The shipped table is monotone in the fatness column per dimension.
    std::map<int, double> prev;
    for (const auto& row : tab.d_rows) {
        auto it = prev.find(row.n);
        if (it != prev.end()) CHECK(row.d >= it->second);
        prev[row.n] = row.d;
    }
    // delta_star_fn halves the margin and penalizes large displacements.
    CHECK(delta_star_fn(0.3, 0.4, 0.0) == 0.2);
    CHECK(delta_star_fn(0.3, 0.4, 0.25) == doctest::Approx(0.4 * 0.5 * 0.75));
    CHECK(delta_star_fn(0.3, 0.4, 0.9) == doctest::Approx(0.4 * 0.5 * 0.5));
    CHECK(delta_star_fn(0.3, 0.4, 5.0) == doctest::Approx(0.4 * 0.5 * 0.5));
}

TEST_CASE("subdivision floors are positive and regenerate bit-identically") {
    auto rows = run_subdivision_floors(30, 404);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.floor > 0);
        CHECK(r.vol_ratio > 0);
        CHECK(r.rho_ratio > 0);
        CHECK(r.phi0 <= 0.15);
        CHECK(r.delta == 0.3);
    }
    CHECK(rows[0].m == 2);
    CHECK(rows[1].m == 3);
    auto again = run_subdivision_floors(30, 404);
    CHECK(to_csv_floors(rows) == to_csv_floors(again));
    auto other = run_subdivision_floors(30, 405);
    CHECK(to_csv_floors(rows) != to_csv_floors(other));
}

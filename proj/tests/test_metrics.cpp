#include "doctest.h"

#include <cmath>
#include <random>

#include "fatmesh/metrics.hpp"
#include "oracles.hpp"

using namespace fatmesh;
using oracles::vec2;
using oracles::vec3;

TEST_CASE("fatness: closed forms") {
    CHECK(fatness(oracles::equilateral_triangle()) ==
          doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-12));

    SimplexPoints collinear = {vec2(0, 0), vec2(1, 1), vec2(2, 2)};
    CHECK(fatness(collinear) == 0.0);

    CHECK(fatness(oracles::regular_tetrahedron()) ==
          doctest::Approx(std::sqrt(2.0) / 12).epsilon(1e-12));

    // right isoceles triangle from splitting the unit square
    SimplexPoints right = {vec2(0, 0), vec2(1, 0), vec2(0, 1)};
    CHECK(fatness(right) == doctest::Approx(0.25).epsilon(1e-12));

    SimplexPoints point = {vec2(0, 0)};
    CHECK(fatness(point) == 1.0);
}

TEST_CASE("fatness agrees with brute-force face enumeration on random simplices") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 150; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 2);
        const int k = 2 + static_cast<int>(rng() % (n - 1));
        SimplexPoints pts;
        for (int i = 0; i <= k; ++i) {
            Vec p(n);
            for (int j = 0; j < n; ++j) p[j] = u(rng);
            pts.push_back(p);
        }
        if (!is_nondegenerate_simplex(pts, kDefaultTol)) continue;
        CHECK(fatness(pts) == doctest::Approx(oracles::brute_force_fatness(pts)).epsilon(1e-9));
        // the simplex is one of its own faces
        CHECK(fatness(pts) <=
              simplex_volume(pts) / std::pow(simplex_diameter(pts), k) + 1e-12);
    }
}

TEST_CASE("fatness is scale and isometry invariant") {
    std::mt19937_64 rng(17);
    SimplexPoints tet = oracles::regular_tetrahedron();
    const double phi = fatness(tet);
    for (double lambda : {0.01, 0.5, 3.0, 1234.5}) {
        SimplexPoints scaled;
        for (const Vec& p : tet) scaled.push_back(lambda * p);
        CHECK(fatness(scaled) == doctest::Approx(phi).epsilon(1e-12));
    }
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd q = oracles::random_rotation(3, rng);
        Vec shift(3);
        shift << 0.3 * trial, -1.0, 2.0;
        SimplexPoints moved;
        for (const Vec& p : tet) moved.push_back(q * p + shift);
        CHECK(fatness(moved) == doctest::Approx(phi).epsilon(1e-9));
    }
}

TEST_CASE("complex_fatness: reports, sentinel, argmin") {
    SUBCASE("single equilateral triangle") {
        Complex c;
        for (const Vec& p : oracles::equilateral_triangle()) c.add_vertex(p);
        c.add_top({0, 1, 2});
        FatnessReport rep = complex_fatness(c);
        CHECK(rep.complex_min == doctest::Approx(std::sqrt(3.0) / 4));
        CHECK(rep.argmin == FaceKey{0, 1, 2});
        CHECK(rep.per_simplex.size() == 1);
    }

    SUBCASE("empty complex") {
        FatnessReport rep = complex_fatness(Complex{});
        CHECK(rep.per_simplex.empty());
        CHECK(std::isnan(rep.complex_min));
    }

    SUBCASE("sliver is the argmin") {
        Complex c;
        for (const Vec& p : oracles::equilateral_triangle()) c.add_vertex(p);
        c.add_top({0, 1, 2});
        // thin triangle far away from the equilateral one, fatness ~ 0.01
        const double h = 0.02;
        c.add_vertex(vec2(10, 0));
        c.add_vertex(vec2(11, 0));
        c.add_vertex(vec2(10.5, h));
        c.add_top({3, 4, 5});
        REQUIRE(validate(c).ok());
        FatnessReport rep = complex_fatness(c);
        CHECK(rep.argmin == FaceKey{3, 4, 5});
        SimplexPoints sliver = {vec2(10, 0), vec2(11, 0), vec2(10.5, h)};
        CHECK(rep.complex_min ==
              doctest::Approx(oracles::brute_force_fatness(sliver)).epsilon(1e-9));
        CHECK(rep.complex_min == doctest::Approx(0.01).epsilon(0.05));
        int total = 0;
        for (int b : rep.histogram) total += b;
        CHECK(total == 2);
    }
}

TEST_CASE("dihedral_angles: triangle vertex angles") {
    AngleReport eq = dihedral_angles(oracles::equilateral_triangle());
    for (int v = 0; v < 3; ++v)
        CHECK(eq.per_face.at({FaceKey{0, 1, 2}, FaceKey{v}}) ==
              doctest::Approx(M_PI / 3).epsilon(1e-12));
    CHECK(eq.min_dihedral == doctest::Approx(M_PI / 3));

    SimplexPoints right = {vec2(0, 0), vec2(1, 0), vec2(0, 1)};
    AngleReport r = dihedral_angles(right);
    CHECK(r.per_face.at({FaceKey{0, 1, 2}, FaceKey{0}}) == doctest::Approx(M_PI / 2));
    CHECK(r.min_dihedral == doctest::Approx(M_PI / 4));
}

TEST_CASE("dihedral_angles: regular tetrahedron edge dihedrals and solid angles") {
    SimplexPoints tet = oracles::regular_tetrahedron();
    AngleReport rep = dihedral_angles(tet);

    const double expect = std::acos(1.0 / 3.0);
    FaceKey whole = {0, 1, 2, 3};
    int edge_faces = 0;
    for (const auto& [key, angle] : rep.per_face) {
        if (key.second.size() != 2) continue;
        ++edge_faces;
        CHECK(angle == doctest::Approx(expect).epsilon(1e-12));

        // oracle: angle between the two facet planes via their normals
        std::vector<int> rest;
        for (int i = 0; i < 4; ++i)
            if (!std::count(key.second.begin(), key.second.end(), i)) rest.push_back(i);
        Eigen::Vector3d e = (tet[key.second[1]] - tet[key.second[0]]).head<3>();
        Eigen::Vector3d p = (tet[rest[0]] - tet[key.second[0]]).head<3>();
        Eigen::Vector3d q = (tet[rest[1]] - tet[key.second[0]]).head<3>();
        Eigen::Vector3d n1 = e.cross(p), n2 = e.cross(q);
        const double oracle = std::acos(n1.dot(n2) / (n1.norm() * n2.norm()));
        CHECK(angle == doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK(edge_faces == 6);
    CHECK(rep.min_dihedral == doctest::Approx(expect));

    // vertex solid angle of the regular tetrahedron: arccos(23/27)
    for (int v = 0; v < 4; ++v)
        CHECK(rep.per_face.at({whole, FaceKey{v}}) ==
              doctest::Approx(std::acos(23.0 / 27.0)).epsilon(1e-9));

    CHECK_THROWS_AS(dihedral_angles(SimplexPoints{vec2(0, 0), vec2(1, 1), vec2(2, 2)}),
                    std::invalid_argument);
}

TEST_CASE("degenerating triangles: fatness and min dihedral co-vanish monotonically") {
    double prev_phi = 1.0, prev_angle = M_PI;
    for (int i = 0; i < 12; ++i) {
        const double h = std::pow(0.5, i);
        SimplexPoints tri = {vec2(0, 0), vec2(1, 0), vec2(0.5, h)};
        const double phi = fatness(tri);
        const double ang = dihedral_angles(tri).min_dihedral;
        CHECK(phi < prev_phi);
        CHECK(ang < prev_angle);
        prev_phi = phi;
        prev_angle = ang;
    }
    CHECK(prev_phi < 1e-3);
    CHECK(prev_angle < 1e-2);
}

TEST_CASE("angles are isometry invariant") {
    std::mt19937_64 rng(23);
    SimplexPoints tet = oracles::regular_tetrahedron();
    AngleReport base = dihedral_angles(tet);
    Eigen::MatrixXd q = oracles::random_rotation(3, rng);
    SimplexPoints moved;
    for (const Vec& p : tet) moved.push_back(q * p + vec3(5, -2, 1));
    AngleReport rot = dihedral_angles(moved);
    for (const auto& [key, angle] : base.per_face)
        CHECK(rot.per_face.at(key) == doctest::Approx(angle).epsilon(1e-9));
}

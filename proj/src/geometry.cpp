#include "fatmesh/geometry.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fatmesh {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// ---------------------------------------------------------------------------
// Bbox

Bbox Bbox::of(const SimplexPoints& pts) {
    Bbox b;
    b.lo = pts.at(0);
    b.hi = pts.at(0);
    for (const Vec& p : pts) {
        b.lo = b.lo.cwiseMin(p);
        b.hi = b.hi.cwiseMax(p);
    }
    return b;
}

bool Bbox::intersects(const Bbox& other, double slack) const {
    for (int i = 0; i < lo.size(); ++i) {
        if (lo[i] > other.hi[i] + slack || other.lo[i] > hi[i] + slack) return false;
    }
    return true;
}

double Bbox::distance(const Bbox& other) const {
    double d2 = 0.0;
    for (int i = 0; i < lo.size(); ++i) {
        double gap = std::max({0.0, lo[i] - other.hi[i], other.lo[i] - hi[i]});
        d2 += gap * gap;
    }
    return std::sqrt(d2);
}

// ---------------------------------------------------------------------------
// Volume / diameter / rank

Mat edge_matrix(const SimplexPoints& pts) {
    const int n = static_cast<int>(pts.at(0).size());
    const int k = static_cast<int>(pts.size()) - 1;
    Mat e(n, k);
    for (int i = 0; i < k; ++i) e.col(i) = pts[i + 1] - pts[0];
    return e;
}

double simplex_volume(const SimplexPoints& pts) {
    const int k = static_cast<int>(pts.size()) - 1;
    if (k < 0) throw std::invalid_argument("simplex_volume: empty point list");
    if (k == 0) return 1.0;  // dimension-0 convention
    Mat e = edge_matrix(pts);
    if (k > e.rows())
        throw std::invalid_argument("simplex_volume: simplex dimension exceeds ambient");
    Eigen::JacobiSVD<Mat> svd(e);
    double prod = 1.0;
    for (int i = 0; i < k; ++i) prod *= svd.singularValues()[i];
    return prod / factorial(k);
}

double simplex_diameter(const SimplexPoints& pts) {
    if (pts.empty()) throw std::invalid_argument("simplex_diameter: empty point list");
    double d = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

int affine_rank(const SimplexPoints& pts, double tol) {
    if (pts.size() <= 1) return 0;
    Eigen::JacobiSVD<Mat> svd(edge_matrix(pts));
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol) ++r;
    return r;
}

bool is_nondegenerate_simplex(const SimplexPoints& pts, double tol) {
    const int k = static_cast<int>(pts.size()) - 1;
    if (k == 0) return true;
    if (k > pts[0].size()) return false;
    return affine_rank(pts, tol) == k;
}

// ---------------------------------------------------------------------------
// Affine hulls

AffineHull affine_hull(const SimplexPoints& pts, double tol) {
    AffineHull h;
    h.origin = pts.at(0);
    const int n = static_cast<int>(pts[0].size());
    if (pts.size() == 1) {
        h.basis = Mat::Zero(n, 0);
        h.dim = 0;
        return h;
    }
    Mat e = edge_matrix(pts);
    Eigen::JacobiSVD<Mat> svd(e, Eigen::ComputeThinU);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol) ++r;
    h.basis = svd.matrixU().leftCols(r);
    h.dim = r;
    return h;
}

Vec to_hull_coords(const AffineHull& h, const Vec& x) {
    return h.basis.transpose() * (x - h.origin);
}

Vec from_hull_coords(const AffineHull& h, const Vec& y) {
    return h.origin + h.basis * y;
}

double hull_distance(const AffineHull& h, const Vec& x) {
    Vec d = x - h.origin;
    return (d - h.basis * (h.basis.transpose() * d)).norm();
}

std::optional<AffineHull> intersect_hulls(const AffineHull& a, const AffineHull& b, double tol) {
    const int n = static_cast<int>(a.origin.size());
    // Solve a.origin + a.basis*y = b.origin + b.basis*z.
    Mat m(n, a.dim + b.dim);
    if (a.dim > 0) m.leftCols(a.dim) = a.basis;
    if (b.dim > 0) m.rightCols(b.dim) = -b.basis;
    Vec rhs = b.origin - a.origin;

    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;

    // Minimum-norm solution and residual.
    Vec s0 = Vec::Zero(a.dim + b.dim);
    if (rank > 0) {
        Vec utr = svd.matrixU().leftCols(rank).transpose() * rhs;
        for (int i = 0; i < rank; ++i) utr[i] /= sv[i];
        s0 = svd.matrixV().leftCols(rank) * utr;
    }
    Vec residual = m.cols() > 0 ? Vec(rhs - m * s0) : rhs;
    if (residual.norm() > tol) return std::nullopt;

    AffineHull h;
    h.origin = a.origin + (a.dim > 0 ? Vec(a.basis * s0.head(a.dim)) : Vec(Vec::Zero(n)));
    // Common direction space: images of the nullspace's y-components.
    const int nullity = static_cast<int>(m.cols()) - rank;
    if (nullity <= 0 || a.dim == 0) {
        h.basis = Mat::Zero(n, 0);
        h.dim = 0;
        return h;
    }
    Mat wy = svd.matrixV().rightCols(nullity).topRows(a.dim);
    Mat dirs = a.basis * wy;  // n x nullity, may be rank deficient only by roundoff
    Eigen::JacobiSVD<Mat> dsvd(dirs, Eigen::ComputeThinU);
    int r = 0;
    for (int i = 0; i < dsvd.singularValues().size(); ++i)
        if (dsvd.singularValues()[i] > tol) ++r;
    h.basis = dsvd.matrixU().leftCols(r);
    h.dim = r;
    return h;
}

// ---------------------------------------------------------------------------
// Barycentric coordinates

Barycentric barycentric_coordinates(const SimplexPoints& pts, const Vec& x) {
    Barycentric out;
    const int k = static_cast<int>(pts.size()) - 1;
    if (k == 0) {
        out.lambda = Eigen::VectorXd::Ones(1);
        out.hull_residual = (x - pts[0]).norm();
        return out;
    }
    Mat e = edge_matrix(pts);
    Vec rhs = x - pts[0];
    Vec u = e.colPivHouseholderQr().solve(rhs);
    out.hull_residual = (rhs - e * u).norm();
    out.lambda = Eigen::VectorXd(k + 1);
    out.lambda[0] = 1.0 - u.sum();
    out.lambda.tail(k) = u;
    return out;
}

bool point_in_simplex(const SimplexPoints& pts, const Vec& x, double tol) {
    Barycentric b = barycentric_coordinates(pts, x);
    if (b.hull_residual > tol) return false;
    return b.lambda.minCoeff() >= -tol;
}

// ---------------------------------------------------------------------------
// Distances

namespace {

// Critical-point candidate distance for one face pair; infinity when the
// unconstrained minimizer leaves either face.
double face_pair_candidate(const SimplexPoints& a, const SimplexPoints& b,
                           unsigned ma, unsigned mb) {
    SimplexPoints fa, fb;
    for (size_t i = 0; i < a.size(); ++i)
        if (ma & (1u << i)) fa.push_back(a[i]);
    for (size_t i = 0; i < b.size(); ++i)
        if (mb & (1u << i)) fb.push_back(b[i]);

    const int da = static_cast<int>(fa.size()) - 1;
    const int db = static_cast<int>(fb.size()) - 1;
    if (da == 0 && db == 0) return (fa[0] - fb[0]).norm();

    const int n = static_cast<int>(fa[0].size());
    Mat m(n, da + db);
    for (int i = 0; i < da; ++i) m.col(i) = fa[i + 1] - fa[0];
    for (int i = 0; i < db; ++i) m.col(da + i) = -(fb[i + 1] - fb[0]);
    Vec rhs = fb[0] - fa[0];

    // Minimum-norm least-squares critical point (handles rank deficiency).
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vec s = svd.solve(rhs);

    const double slack = 1e-10;
    double sum = 0.0;
    for (int i = 0; i < da; ++i) {
        if (s[i] < -slack) return std::numeric_limits<double>::infinity();
        sum += s[i];
    }
    if (da > 0 && sum > 1.0 + slack) return std::numeric_limits<double>::infinity();
    sum = 0.0;
    for (int i = 0; i < db; ++i) {
        if (s[da + i] < -slack) return std::numeric_limits<double>::infinity();
        sum += s[da + i];
    }
    if (db > 0 && sum > 1.0 + slack) return std::numeric_limits<double>::infinity();

    return (rhs - m * s).norm();
}

}  // namespace

std::vector<std::vector<double>> face_pair_distances(const SimplexPoints& a,
                                                     const SimplexPoints& b) {
    const unsigned na = 1u << a.size();
    const unsigned nb = 1u << b.size();
    std::vector<std::vector<double>> d(na, std::vector<double>(nb, std::numeric_limits<double>::infinity()));

    for (unsigned ma = 1; ma < na; ++ma)
        for (unsigned mb = 1; mb < nb; ++mb)
            d[ma][mb] = face_pair_candidate(a, b, ma, mb);

    // Distance of a face pair is the best feasible candidate over all
    // sub-face pairs: two subset-minimum sweeps.
    for (unsigned mb = 1; mb < nb; ++mb)
        for (size_t bit = 0; bit < a.size(); ++bit)
            for (unsigned ma = 1; ma < na; ++ma)
                if (ma & (1u << bit)) d[ma][mb] = std::min(d[ma][mb], d[ma ^ (1u << bit)][mb]);
    for (unsigned ma = 1; ma < na; ++ma)
        for (size_t bit = 0; bit < b.size(); ++bit)
            for (unsigned mb = 1; mb < nb; ++mb)
                if (mb & (1u << bit)) d[ma][mb] = std::min(d[ma][mb], d[ma][mb ^ (1u << bit)]);
    return d;
}

double simplex_distance(const SimplexPoints& a, const SimplexPoints& b) {
    auto d = face_pair_distances(a, b);
    return d[(1u << a.size()) - 1][(1u << b.size()) - 1];
}

double point_simplex_distance(const Vec& x, const SimplexPoints& s) {
    return simplex_distance({x}, s);
}

// ---------------------------------------------------------------------------
// Angles

double hull_angle(const SimplexPoints& a, const SimplexPoints& b, double tol) {
    AffineHull ha = affine_hull(a, tol);
    AffineHull hb = affine_hull(b, tol);
    if (ha.dim == 0 || hb.dim == 0) return M_PI / 2;  // points meet everything transversally
    Mat m = ha.basis.transpose() * hb.basis;
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    // Directions with cosine ~ 1 span the common subspace; drop them.
    int common = 0;
    while (common < sv.size() && sv[common] >= 1.0 - 1e-9) ++common;
    if (common == std::min(ha.dim, hb.dim)) {
        // One direction space inside the other: no transversal angle left.
        return 0.0;
    }
    double c = std::clamp(sv[common], -1.0, 1.0);
    return std::acos(c);
}

// ---------------------------------------------------------------------------
// Sampling

Vec sample_unit_sphere(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(d);
    do {
        for (int i = 0; i < d; ++i) v[i] = g(rng);
    } while (v.norm() < 1e-12);
    return v / v.norm();
}

Vec sample_unit_ball(std::mt19937_64& rng, int d) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec v = sample_unit_sphere(rng, d);
    double r = std::pow(u(rng), 1.0 / d);
    return v * r;
}

namespace {
constexpr int kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(int index, int base) {
    double inv = 1.0 / base, f = inv, x = 0.0;
    int i = index + 1;  // skip the all-zero sample
    while (i > 0) {
        x += (i % base) * f;
        i /= base;
        f *= inv;
    }
    return x;
}
}  // namespace

Vec halton_point(int index, int d) {
    if (d > 12) throw std::invalid_argument("halton_point: dimension too large");
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = radical_inverse(index, kHaltonBases[i]);
    return v;
}

Eigen::VectorXd halton_barycentric(int index, int nverts) {
    Vec u = halton_point(index, nverts);
    Eigen::VectorXd e(nverts);
    for (int i = 0; i < nverts; ++i) e[i] = -std::log(std::max(1.0 - u[i], 1e-16));
    return e / e.sum();
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

}  // namespace fatmesh

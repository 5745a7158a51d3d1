#include "fatmesh/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fatmesh/convex.hpp"
#include "fatmesh/metrics.hpp"
#include "fatmesh/transversal.hpp"

namespace fatmesh {

namespace {

// Probe grids. Displacements descend so the scan can stop at the first
// fraction every trial survives; the fatness and angle levels cover the range
// the merge pipeline actually requests.
constexpr double kRGrid[] = {0.5,  0.4,   0.3,   0.25,  0.2,  0.15, 0.1,
                             0.075, 0.05, 0.035, 0.025, 0.015, 0.01, 0.005};
constexpr double kDPhi[] = {0.02, 0.05, 0.1, 0.2, 0.3, 0.4};
constexpr int kDims[] = {2, 3, 4};
constexpr double kDeltaPhi[] = {0.02, 0.05, 0.1, 0.2};
constexpr double kDeltaLevel[] = {0.1, 0.2, 0.4};

// Length scale for the transversality trials, as a fraction of the moving
// simplex's diameter.
constexpr double kEtaFraction = 0.1;

// Deterministic per-cell stream so grid cells are independent of evaluation
// order (splitmix-style mixing).
std::uint64_t cell_seed(std::uint64_t seed, int table, int a, int b) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(
                                  1 + table + 64 * a + 4096 * b));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

// Vertices of the regular n-simplex with unit edges: the standard basis of
// R^{n+1} projected into the hyperplane it spans.
SimplexPoints regular_simplex(int n) {
    Mat pts = Mat::Identity(n + 1, n + 1);
    Eigen::RowVectorXd centroid = pts.colwise().mean();
    Mat centered = pts.rowwise() - centroid;
    Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeThinV);
    Mat coords = centered * svd.matrixV().leftCols(n) / std::sqrt(2.0);
    SimplexPoints out;
    out.reserve(n + 1);
    for (int i = 0; i <= n; ++i) out.push_back(coords.row(i).transpose());
    return out;
}

// Centroid at the origin, diameter one.
SimplexPoints normalized(SimplexPoints s) {
    Vec c = Vec::Zero(s.front().size());
    for (const auto& p : s) c += p;
    c /= static_cast<double>(s.size());
    for (auto& p : s) p -= c;
    double d = simplex_diameter(s);
    if (d > 0)
        for (auto& p : s) p /= d;
    return s;
}

SimplexPoints blend(const SimplexPoints& a, const SimplexPoints& b, double t) {
    SimplexPoints out = a;
    for (size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
    return out;
}

// Copy of s with its thinnest principal direction squashed; blending toward
// it lowers fatness continuously to ~0.
SimplexPoints squashed(const SimplexPoints& s) {
    const int n = static_cast<int>(s.front().size());
    Mat m(static_cast<int>(s.size()), n);
    for (size_t i = 0; i < s.size(); ++i) m.row(static_cast<int>(i)) = s[i].transpose();
    Eigen::RowVectorXd centroid = m.colwise().mean();
    Mat centered = m.rowwise() - centroid;
    Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeThinV);
    Vec thin = svd.matrixV().col(n - 1);
    SimplexPoints out = s;
    for (auto& p : out) {
        Vec d = p - centroid.transpose();
        p = centroid.transpose() + d - 0.999 * d.dot(thin) * thin;
    }
    return out;
}

// Lift a k-dimensional simplex into R^n with a random orientation (QR of a
// Gaussian matrix, columns sign-fixed).
SimplexPoints embed_rotated(std::mt19937_64& rng, const SimplexPoints& s, int n) {
    const int k = static_cast<int>(s.front().size());
    std::normal_distribution<double> gauss;
    Mat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    SimplexPoints out;
    out.reserve(s.size());
    for (const auto& p : s) out.push_back(q.leftCols(k) * p);
    return out;
}

// The trial families fix the smaller simplex at unit diameter and let the
// larger one range up to 2(1+delta) times that, the compact range the overlap
// analysis quantifies over.
double partner_scale(std::mt19937_64& rng, double delta) {
    std::uniform_real_distribution<double> u(1.0, 2.0 * (1.0 + delta));
    return u(rng);
}

// A pair of simplices of complementary dimensions crossing near the origin
// that passes the transversality predicate at the requested level.
std::optional<std::pair<SimplexPoints, SimplexPoints>> make_crossing_pair(
    std::mt19937_64& rng, int n, int k1, int k2, double phi,
    const TransversalityConfig& cfg) {
    for (int tries = 0; tries < 50; ++tries) {
        SimplexPoints a = random_fat_simplex(rng, k1, phi);
        SimplexPoints b = random_fat_simplex(rng, k2, phi);
        if (a.empty() || b.empty()) return std::nullopt;
        a = embed_rotated(rng, a, n);
        b = embed_rotated(rng, b, n);
        const double scale = partner_scale(rng, cfg.delta);
        Vec jitter = 0.02 * sample_unit_ball(rng, n);
        for (auto& p : b) p = scale * p + jitter;
        if (!is_nondegenerate_simplex(a, cfg.tol) || !is_nondegenerate_simplex(b, cfg.tol))
            continue;
        if (is_delta_transverse(a, b, cfg)) return std::make_pair(a, b);
    }
    return std::nullopt;
}

// A pair of overlapping full-dimensional simplices passing the predicate.
std::optional<std::pair<SimplexPoints, SimplexPoints>> make_overlap_pair(
    std::mt19937_64& rng, int n, double phi, const TransversalityConfig& cfg) {
    for (int tries = 0; tries < 100; ++tries) {
        SimplexPoints a = random_fat_simplex(rng, n, phi);
        SimplexPoints b = random_fat_simplex(rng, n, phi);
        if (a.empty() || b.empty()) return std::nullopt;
        const double scale = partner_scale(rng, cfg.delta);
        Vec jitter = 0.1 * sample_unit_ball(rng, n);
        for (auto& p : b) p = scale * p + jitter;
        if (is_delta_transverse(a, b, cfg)) return std::make_pair(a, b);
    }
    return std::nullopt;
}

std::string format_row(double a, double b, double c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", a, b, c);
    return buf;
}

std::vector<double> split_fields(const std::string& line, size_t expect) {
    std::vector<double> out;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) {
        size_t used = 0;
        out.push_back(std::stod(field, &used));
        if (used != field.size())
            throw std::runtime_error("calibration CSV: bad field '" + field + "'");
    }
    if (out.size() != expect)
        throw std::runtime_error("calibration CSV: bad line '" + line + "'");
    return out;
}

}  // namespace

double max_simplex_fatness(int n) {
    if (n < 1) throw std::invalid_argument("max_simplex_fatness: dimension must be positive");
    // The regular simplex maximizes fatness; its unit-edge volume is
    // sqrt(n+1) / (n! 2^{n/2}) and its diameter is 1.
    double factorial = 1.0;
    for (int k = 2; k <= n; ++k) factorial *= k;
    return std::sqrt(n + 1.0) / (factorial * std::pow(2.0, n / 2.0));
}

SimplexPoints random_fat_simplex(std::mt19937_64& rng, int n, double phi_target) {
    if (n < 1) throw std::invalid_argument("random_fat_simplex: dimension must be positive");
    if (!(phi_target > 0))
        throw std::invalid_argument("random_fat_simplex: fatness target must be positive");
    if (phi_target > 0.999 * max_simplex_fatness(n)) return {};
    if (n == 1) {
        SimplexPoints seg{Vec::Constant(1, -0.5), Vec::Constant(1, 0.5)};
        return seg;
    }
    // Land a hair above the target so the result is genuinely phi_target-fat.
    const double want = std::min(1.02 * phi_target, 0.999 * max_simplex_fatness(n));
    std::normal_distribution<double> gauss;
    for (int attempt = 0; attempt < 64; ++attempt) {
        SimplexPoints x(n + 1, Vec(n));
        for (auto& p : x)
            for (int i = 0; i < n; ++i) p[i] = gauss(rng);
        x = normalized(x);
        if (simplex_diameter(x) <= 0) continue;
        const double fx = fatness(x);
        // Pull toward the regular simplex to raise fatness, toward a squashed
        // copy to lower it, and bisect the blend parameter.
        SimplexPoints other = normalized(fx < want ? regular_simplex(n) : squashed(x));
        const double fo = fatness(other);
        if ((fx - want) * (fo - want) > 0) continue;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = fatness(normalized(blend(x, other, mid)));
            if ((fm - want) * (fx - want) > 0)
                lo = mid;
            else
                hi = mid;
        }
        SimplexPoints out = normalized(blend(x, other, 0.5 * (lo + hi)));
        if (fatness(out) >= phi_target && is_nondegenerate_simplex(out, kDefaultTol)) return out;
    }
    throw std::runtime_error("random_fat_simplex: could not reach the requested fatness");
}

CalibrationTables run_calibration(int trials, std::uint64_t seed,
                                  const std::vector<double>& phi_grid,
                                  const std::vector<int>& dims) {
    if (trials < 1) throw std::invalid_argument("run_calibration: trial count must be positive");
    if (phi_grid.empty() || dims.empty())
        throw std::invalid_argument("run_calibration: empty grid");
    for (double p : phi_grid)
        if (!(p > 0)) throw std::invalid_argument("run_calibration: fatness grid must be positive");
    std::vector<double> phis = phi_grid;
    std::sort(phis.begin(), phis.end());
    CalibrationTables tab;
    tab.trials = trials;
    tab.seed = seed;

    // Displacement-vs-fatness: move every vertex of a barely-phi0-fat
    // unit-diameter simplex by the fraction r in an independent random
    // direction and record the largest r at which no trial lost half its
    // fatness.
    for (int n : dims) {
        if (n < 2) throw std::invalid_argument("run_calibration: dimensions start at 2");
        const size_t first = tab.d_rows.size();
        for (size_t pi = 0; pi < phis.size(); ++pi) {
            const double phi0 = phis[pi];
            double d = 0.5;  // no phi0-fat simplex exists: the row is vacuous
            if (phi0 < max_simplex_fatness(n)) {
                std::mt19937_64 rng(cell_seed(seed, 1, n, static_cast<int>(pi)));
                std::vector<SimplexPoints> sims;
                std::vector<std::vector<Vec>> dirs(trials);
                sims.reserve(trials);
                for (int t = 0; t < trials; ++t) {
                    sims.push_back(random_fat_simplex(rng, n, phi0));
                    dirs[t].reserve(n + 1);
                    for (int v = 0; v <= n; ++v) dirs[t].push_back(sample_unit_sphere(rng, n));
                }
                d = 0.0;
                for (double r : kRGrid) {
                    bool all_ok = true;
                    for (int t = 0; t < trials && all_ok; ++t) {
                        SimplexPoints moved = sims[t];
                        for (int v = 0; v <= n; ++v) moved[v] += r * dirs[t][v];
                        all_ok = fatness(moved) >= phi0 / 2;
                    }
                    if (all_ok) {
                        d = r;
                        break;
                    }
                }
            }
            tab.d_rows.push_back({phi0, n, d});
        }
        // Ship a table monotone non-decreasing in phi0 without ever claiming
        // more than a measured value: descending running minimum.
        for (size_t i = tab.d_rows.size() - 1; i > first; --i)
            tab.d_rows[i - 1].d = std::min(tab.d_rows[i - 1].d, tab.d_rows[i].d);
    }

    // Displacement-vs-transversality: pairs of complementary dimension
    // crossing near the origin, the smaller one displaced by r, must keep
    // half the transversality level. Worst case over the ambient dimensions.
    for (size_t pi = 0; pi < std::size(kDeltaPhi); ++pi) {
        for (size_t di = 0; di < std::size(kDeltaLevel); ++di) {
            const double phi = kDeltaPhi[pi];
            const double delta = kDeltaLevel[di];
            double dmin = 0.5;
            for (int n : kDims) {
                std::mt19937_64 rng(
                    cell_seed(seed, 2, static_cast<int>(pi * 8 + di), n));
                TransversalityConfig base;
                base.delta = delta;
                base.eta1 = kEtaFraction;
                TransversalityConfig half = base;
                half.delta = delta / 2;
                const int k1 = n / 2, k2 = n - n / 2;
                std::vector<std::pair<SimplexPoints, SimplexPoints>> prs;
                std::vector<std::vector<Vec>> dirs;
                prs.reserve(trials);
                while (static_cast<int>(prs.size()) < trials) {
                    auto pr = make_crossing_pair(rng, n, k1, k2, phi, base);
                    if (!pr) break;
                    dirs.emplace_back();
                    for (size_t v = 0; v < pr->first.size(); ++v)
                        dirs.back().push_back(sample_unit_sphere(rng, n));
                    prs.push_back(std::move(*pr));
                }
                double d = 0.0;
                if (!prs.empty()) {
                    for (double r : kRGrid) {
                        bool all_ok = true;
                        for (size_t t = 0; t < prs.size() && all_ok; ++t) {
                            SimplexPoints moved = prs[t].first;
                            for (size_t v = 0; v < moved.size(); ++v)
                                moved[v] += r * dirs[t][v];
                            all_ok = is_nondegenerate_simplex(moved, base.tol) &&
                                     is_delta_transverse(moved, prs[t].second, half);
                        }
                        if (all_ok) {
                            d = r;
                            break;
                        }
                    }
                }
                dmin = std::min(dmin, d);
            }
            tab.delta_rows.push_back({phi, delta, dmin});
        }
    }
    // Same conservative monotone smoothing along the fatness axis, per level.
    for (size_t di = 0; di < std::size(kDeltaLevel); ++di)
        for (size_t pi = std::size(kDeltaPhi) - 1; pi > 0; --pi) {
            auto& lower = tab.delta_rows[(pi - 1) * std::size(kDeltaLevel) + di];
            const auto& upper = tab.delta_rows[pi * std::size(kDeltaLevel) + di];
            lower.d = std::min(lower.d, upper.d);
        }
    return tab;
}

CalibrationTables run_calibration(int trials, std::uint64_t seed) {
    return run_calibration(trials, seed,
                           std::vector<double>(std::begin(kDPhi), std::end(kDPhi)),
                           std::vector<int>(std::begin(kDims), std::end(kDims)));
}

double lookup_d_phi0(const CalibrationTables& t, double phi0, int n) {
    if (!(phi0 > 0)) throw std::invalid_argument("lookup_d_phi0: fatness must be positive");
    if (n < 1) throw std::invalid_argument("lookup_d_phi0: dimension must be positive");
    const int nq = std::clamp(n, 2, 4);  // table covers the calibrated dimensions
    double best = 0.0, best_phi = -1.0;
    for (const auto& row : t.d_rows)
        if (row.n == nq && row.phi0 <= phi0 + 1e-12 && row.phi0 > best_phi) {
            best_phi = row.phi0;
            best = row.d;
        }
    return std::min(std::max(best, phi0 / (4.0 * n)), 0.5);
}

double lookup_delta_fn(const CalibrationTables& t, double phi, double delta) {
    if (!(phi > 0) || !(delta > 0))
        throw std::invalid_argument("lookup_delta_fn: fatness and angle must be positive");
    double best = 0.0, bp = -1.0, bd = -1.0;
    for (const auto& row : t.delta_rows)
        if (row.phi <= phi + 1e-12 && row.delta <= delta + 1e-12 &&
            (row.phi > bp || (row.phi == bp && row.delta > bd))) {
            bp = row.phi;
            bd = row.delta;
            best = row.d;
        }
    return std::min(std::max(best, delta * phi / 16.0), 0.5);
}

double delta_star_fn(double phi0, double delta_prev, double r) {
    if (!(phi0 > 0) || !(delta_prev > 0) || !(r >= 0))
        throw std::invalid_argument("delta_star_fn: arguments out of range");
    // Half the incoming margin, with a linear penalty in the displacement
    // fraction floored at half weight: monotone in delta_prev, never zero.
    return 0.5 * delta_prev * std::clamp(1.0 - r, 0.5, 1.0);
}

std::string to_csv_d(const CalibrationTables& t) {
    auto rows = t.d_rows;
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.n != b.n ? a.n < b.n : a.phi0 < b.phi0;
    });
    std::string out = "phi0,n,d_phi0\n";
    for (const auto& r : rows) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", r.phi0, r.n, r.d);
        out += buf;
    }
    return out;
}

std::string to_csv_delta(const CalibrationTables& t) {
    auto rows = t.delta_rows;
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.phi != b.phi ? a.phi < b.phi : a.delta < b.delta;
    });
    std::string out = "phi,delta,delta_fn\n";
    for (const auto& r : rows) out += format_row(r.phi, r.delta, r.d);
    return out;
}

std::string CalibrationTables::version_hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const std::string& text : {to_csv_d(*this), to_csv_delta(*this)})
        for (unsigned char c : text) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CalibrationTables from_csv(const std::string& d_csv, const std::string& delta_csv) {
    CalibrationTables t;
    std::istringstream in_d(d_csv);
    std::string line;
    if (!std::getline(in_d, line) || line != "phi0,n,d_phi0")
        throw std::runtime_error("calibration CSV: unexpected header '" + line + "'");
    while (std::getline(in_d, line)) {
        if (line.empty()) continue;
        auto f = split_fields(line, 3);
        t.d_rows.push_back({f[0], static_cast<int>(std::llround(f[1])), f[2]});
    }
    std::istringstream in_delta(delta_csv);
    if (!std::getline(in_delta, line) || line != "phi,delta,delta_fn")
        throw std::runtime_error("calibration CSV: unexpected header '" + line + "'");
    while (std::getline(in_delta, line)) {
        if (line.empty()) continue;
        auto f = split_fields(line, 3);
        t.delta_rows.push_back({f[0], f[1], f[2]});
    }
    return t;
}

std::vector<SubdivisionFloor> run_subdivision_floors(int pairs, std::uint64_t seed) {
    if (pairs < 1)
        throw std::invalid_argument("run_subdivision_floors: pair count must be positive");
    const double delta = 0.3;
    std::vector<SubdivisionFloor> rows;
    for (int m : {2, 3}) {
        // Keep the fatness level attainable in each dimension.
        const double phi0 = std::min(0.15, 0.7 * max_simplex_fatness(m));
        std::mt19937_64 rng(cell_seed(seed, 3, m, 0));
        TransversalityConfig cfg;
        cfg.delta = delta;
        cfg.eta1 = kEtaFraction;
        double lowest = std::numeric_limits<double>::infinity();
        double vol_ratio = std::numeric_limits<double>::infinity();
        double rho_ratio = std::numeric_limits<double>::infinity();
        int made = 0;
        long attempts = 0;
        const long cap = 200L * pairs;
        while (made < pairs && attempts < cap) {
            ++attempts;
            auto pr = make_overlap_pair(rng, m, phi0, cfg);
            if (!pr) continue;
            auto cell = intersect_simplices(pr->first, pr->second, kDefaultTol);
            if (!cell || cell->dim < m) continue;
            auto pieces = subdivide_cell_fat(*cell);
            double total = 0.0;
            for (const auto& piece : pieces) {
                total += simplex_volume(piece);
                lowest = std::min(lowest, fatness(piece));
            }
            const double want = cell_volume(*cell);
            if (std::abs(total - want) > 1e-9 * std::max(1.0, want))
                throw std::runtime_error("run_subdivision_floors: subdivision volume leak");
            // The first simplex has unit diameter, so the cell volume and
            // inradius are already the ratios the overlap analysis bounds.
            vol_ratio = std::min(vol_ratio, want);
            rho_ratio = std::min(rho_ratio, chebyshev_point(*cell).second);
            ++made;
        }
        if (made < pairs)
            throw std::runtime_error(
                "run_subdivision_floors: could not generate enough transverse pairs");
        rows.push_back({m, phi0, delta, lowest, vol_ratio, rho_ratio});
    }
    return rows;
}

std::string to_csv_floors(const std::vector<SubdivisionFloor>& rows) {
    std::string out = "m,phi0,delta,floor,vol_ratio,rho_ratio\n";
    for (const auto& r : rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.m, r.phi0,
                      r.delta, r.floor, r.vol_ratio, r.rho_ratio);
        out += buf;
    }
    return out;
}

namespace {

// Values frozen from `run_calibration(10000, 20260814)`; regenerate with
// `fatmesh calibrate`. Kept in one place so the version hash is stable.
CalibrationTables make_builtin() {
    CalibrationTables t;
    t.trials = 10000;
    t.seed = 20260814;
    t.d_rows = {
        {0.02, 2, 0.01},
        {0.050000000000000003, 2, 0.025000000000000001},
        {0.10000000000000001, 2, 0.050000000000000003},
        {0.20000000000000001, 2, 0.074999999999999997},
        {0.29999999999999999, 2, 0.10000000000000001},
        {0.40000000000000002, 2, 0.14999999999999999},
        {0.02, 3, 0.035000000000000003},
        {0.050000000000000003, 3, 0.074999999999999997},
        {0.10000000000000001, 3, 0.10000000000000001},
        {0.20000000000000001, 3, 0.5},
        {0.29999999999999999, 3, 0.5},
        {0.40000000000000002, 3, 0.5},
        {0.02, 4, 0.074999999999999997},
        {0.050000000000000003, 4, 0.5},
        {0.10000000000000001, 4, 0.5},
        {0.20000000000000001, 4, 0.5},
        {0.29999999999999999, 4, 0.5},
        {0.40000000000000002, 4, 0.5},
    };
    t.delta_rows = {
        {0.02, 0.10000000000000001, 0.0050000000000000001},
        {0.02, 0.20000000000000001, 0},
        {0.02, 0.40000000000000002, 0},
        {0.050000000000000003, 0.10000000000000001, 0.0050000000000000001},
        {0.050000000000000003, 0.20000000000000001, 0.01},
        {0.050000000000000003, 0.40000000000000002, 0.014999999999999999},
        {0.10000000000000001, 0.10000000000000001, 0.0050000000000000001},
        {0.10000000000000001, 0.20000000000000001, 0.01},
        {0.10000000000000001, 0.40000000000000002, 0.014999999999999999},
        {0.20000000000000001, 0.10000000000000001, 0.0050000000000000001},
        {0.20000000000000001, 0.20000000000000001, 0.014999999999999999},
        {0.20000000000000001, 0.40000000000000002, 0.025000000000000001},
    };
    return t;
}

}  // namespace

const CalibrationTables& builtin_calibration() {
    static const CalibrationTables tab = make_builtin();
    return tab;
}

}  // namespace fatmesh

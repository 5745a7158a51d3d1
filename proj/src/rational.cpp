#include "fatmesh/rational.hpp"

#include <algorithm>
#include <functional>

namespace fatmesh {

RatVec to_rational(const Vec& v) {
    RatVec out(v.size());
    for (int i = 0; i < v.size(); ++i) out[i] = Rat(v[i]);  // exact for finite doubles
    return out;
}

int rref(RatMat& m) {
    if (m.empty()) return 0;
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r) {
            if (m[r][col] != 0) { pivot = r; break; }
        }
        if (pivot < 0) continue;
        std::swap(m[rank], m[pivot]);
        Rat inv = m[rank][col];
        for (int c = col; c < cols; ++c) m[rank][c] /= inv;
        for (int r = 0; r < rows; ++r) {
            if (r == rank || m[r][col] == 0) continue;
            Rat f = m[r][col];
            for (int c = col; c < cols; ++c) m[r][c] -= f * m[rank][c];
        }
        ++rank;
    }
    return rank;
}

RatSolve solve_exact(const RatMat& a, const RatVec& b) {
    RatSolve out;
    const int rows = static_cast<int>(a.size());
    const int cols = rows > 0 ? static_cast<int>(a[0].size()) : 0;
    RatMat aug(rows, RatVec(cols + 1));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) aug[r][c] = a[r][c];
        aug[r][cols] = b[r];
    }
    rref(aug);

    // Identify pivot columns.
    std::vector<int> pivot_col(rows, -1);
    std::vector<bool> is_pivot(cols, false);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (aug[r][c] != 0) {
                pivot_col[r] = c;
                is_pivot[c] = true;
                break;
            }
        }
        if (pivot_col[r] < 0 && aug[r][cols] != 0) return out;  // 0 = nonzero
    }
    out.consistent = true;
    out.particular.assign(cols, Rat(0));
    for (int r = 0; r < rows; ++r)
        if (pivot_col[r] >= 0) out.particular[pivot_col[r]] = aug[r][cols];

    for (int c = 0; c < cols; ++c) {
        if (is_pivot[c]) continue;
        RatVec basis(cols, Rat(0));
        basis[c] = 1;
        for (int r = 0; r < rows; ++r)
            if (pivot_col[r] >= 0) basis[pivot_col[r]] = -aug[r][c];
        out.nullspace.push_back(std::move(basis));
    }
    return out;
}

namespace {

// Affine constraint c0 + dot(c, t) >= 0 over the free parameters.
struct AffineConstraint {
    Rat c0;
    RatVec c;
};

Rat eval(const AffineConstraint& f, const RatVec& t) {
    Rat v = f.c0;
    for (size_t i = 0; i < t.size(); ++i) v += f.c[i] * t[i];
    return v;
}

// Exact membership of x in the simplex spanned by the given points.
bool in_simplex_exact(const std::vector<RatVec>& verts, const RatVec& x) {
    const int n = static_cast<int>(x.size());
    const int k = static_cast<int>(verts.size());
    // Solve sum mu_i v_i = x, sum mu_i = 1, mu >= 0.
    RatMat a(n + 1, RatVec(k));
    RatVec b(n + 1);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < k; ++c) a[r][c] = verts[c][r];
        b[r] = x[r];
    }
    for (int c = 0; c < k; ++c) a[n][c] = 1;
    b[n] = 1;
    RatSolve s = solve_exact(a, b);
    if (!s.consistent) return false;
    if (s.nullspace.empty()) {
        for (const Rat& mu : s.particular)
            if (mu < 0) return false;
        return true;
    }
    // Affinely independent simplex vertices give a unique solution; a
    // nullspace can only appear for degenerate faces, which the callers
    // exclude. Be conservative in that case.
    for (const Rat& mu : s.particular)
        if (mu < 0) return false;
    return true;
}

}  // namespace

bool exact_intersection_is_shared_face(const SimplexPoints& ptsA,
                                       const SimplexPoints& ptsB,
                                       const std::vector<int>& sharedA,
                                       const std::vector<int>& sharedB) {
    (void)sharedB;
    const int n = static_cast<int>(ptsA.at(0).size());
    const int ka = static_cast<int>(ptsA.size()) - 1;
    const int kb = static_cast<int>(ptsB.size()) - 1;

    std::vector<RatVec> a(ptsA.size()), b(ptsB.size());
    for (size_t i = 0; i < ptsA.size(); ++i) a[i] = to_rational(ptsA[i]);
    for (size_t i = 0; i < ptsB.size(); ++i) b[i] = to_rational(ptsB[i]);

    // Shared-face vertex positions (exact doubles, assumed identical in both).
    std::vector<RatVec> shared;
    for (int ia : sharedA) shared.push_back(a[ia]);

    // Common points: a0 + Ea*alpha = b0 + Eb*beta.
    RatMat sys(n, RatVec(ka + kb));
    RatVec rhs(n);
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < ka; ++i) sys[r][i] = a[i + 1][r] - a[0][r];
        for (int i = 0; i < kb; ++i) sys[r][ka + i] = -(b[i + 1][r] - b[0][r]);
        rhs[r] = b[0][r] - a[0][r];
    }
    RatSolve sol = solve_exact(sys, rhs);
    if (!sol.consistent) return shared.empty();  // hulls miss entirely

    const int f = static_cast<int>(sol.nullspace.size());

    // Barycentric nonnegativity as affine constraints over the free params.
    std::vector<AffineConstraint> cons;
    auto add_simplex_constraints = [&](int offset, int k) {
        // lambda_0 = 1 - sum of the k coefficients; lambda_i = coefficient.
        AffineConstraint l0;
        l0.c0 = 1;
        l0.c.assign(f, Rat(0));
        for (int i = 0; i < k; ++i) {
            l0.c0 -= sol.particular[offset + i];
            for (int j = 0; j < f; ++j) l0.c[j] -= sol.nullspace[j][offset + i];
        }
        cons.push_back(std::move(l0));
        for (int i = 0; i < k; ++i) {
            AffineConstraint li;
            li.c0 = sol.particular[offset + i];
            li.c.assign(f, Rat(0));
            for (int j = 0; j < f; ++j) li.c[j] = sol.nullspace[j][offset + i];
            cons.push_back(std::move(li));
        }
    };
    add_simplex_constraints(0, ka);
    add_simplex_constraints(ka, kb);

    auto point_from_params = [&](const RatVec& t) {
        RatVec alpha(ka);
        for (int i = 0; i < ka; ++i) {
            alpha[i] = sol.particular[i];
            for (int j = 0; j < f; ++j) alpha[i] += sol.nullspace[j][i] * t[j];
        }
        RatVec x = a[0];
        for (int i = 0; i < ka; ++i)
            for (int r = 0; r < n; ++r) x[r] += alpha[i] * (a[i + 1][r] - a[0][r]);
        return x;
    };

    std::vector<RatVec> poly_vertices;
    auto consider = [&](const RatVec& t) {
        for (const auto& c : cons)
            if (eval(c, t) < 0) return;
        RatVec x = point_from_params(t);
        for (const auto& v : poly_vertices)
            if (v == x) return;
        poly_vertices.push_back(std::move(x));
    };

    if (f == 0) {
        consider(RatVec{});
    } else {
        // Vertices of the (bounded) intersection polytope: every feasible
        // basic solution of f tight constraints.
        const int m = static_cast<int>(cons.size());
        std::vector<int> idx(f);
        std::function<void(int, int)> rec = [&](int start, int depth) {
            if (depth == f) {
                RatMat mm(f, RatVec(f));
                RatVec bb(f);
                for (int r = 0; r < f; ++r) {
                    for (int c = 0; c < f; ++c) mm[r][c] = cons[idx[r]].c[c];
                    bb[r] = -cons[idx[r]].c0;
                }
                RatSolve s = solve_exact(mm, bb);
                if (s.consistent && s.nullspace.empty()) consider(s.particular);
                return;
            }
            for (int i = start; i <= m - (f - depth); ++i) {
                idx[depth] = i;
                rec(i + 1, depth + 1);
            }
        };
        rec(0, 0);
    }

    if (poly_vertices.empty()) return shared.empty();
    if (shared.empty()) return false;  // intersection exists but no common face

    for (const auto& v : poly_vertices)
        if (!in_simplex_exact(shared, v)) return false;
    return true;
}

}  // namespace fatmesh

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fatmesh/collar.hpp"
#include "fatmesh/complex.hpp"
#include "fatmesh/metrics.hpp"
#include "fatmesh/transversal.hpp"

namespace fatmesh {

// The four nested neighborhoods of a local merge step around the ball
// B_eps(v0): L2/M2 reference the fixed complex c2, L1/M1 the moving complex
// c1. Each set is closed under faces, with L2 within M2 and L1 within M1.
struct OverlapRegions {
    SubcomplexRef L1, L2, M1, M2;
};

// Classify both complexes around v0. L2 holds the c2 simplices strictly
// inside the ball whose distance to the sphere lies in [d1, d2]; M2 extends
// L2 by every simplex of a full-dimensional c2 top inside the ball that
// touches |L2|. L1 holds the c1 simplices within d2 of |L2| and M1 extends
// it the same way M2 extends L2. Throws std::invalid_argument when the ball
// reaches no c2 simplex (eps too small) and std::runtime_error when the
// distance band selects nothing (empty overlap).
OverlapRegions select_overlap_regions(const Complex& c1, const Complex& c2, const Vec& v0,
                                      double eps, double d1, double d2);

// Tuning for merge_fat_triangulations and the boundary-extension pipeline.
// Defaults are the calibrated operating point; zeros mean "derive from the
// inputs" as documented per field.
struct MergeConfig {
    double delta = 0.3;            // transversality level the schedule is built for
    double eta1 = 0.0;             // gap scale of the predicate; <= 0 uses a tenth of
                                   // the largest overlapping-simplex diameter
    double floor_fraction = 0.25;  // accepted output fatness as a fraction of the
                                   // smaller input fatness
    double ball_radius = 0.0;      // sweep neighborhood radius; <= 0 uses 3x the largest
                                   // overlapping-simplex diameter
    std::uint64_t seed = 20260814;
    std::vector<int> pinned;       // c1 vertex ids that must never move

    // Pipeline-only knobs for extend_boundary_triangulation.
    double collar_shrink = 0.5;    // radial shrink of the depth-1 collar
    double collar_phi = 0.0;       // collar fatness target; <= 0 uses half the
                                   // boundary fatness, capped at 0.15
};

// One vertex move of the transversality sweep, in execution order.
struct MoveRecord {
    int stage = 0;        // skeleton dimension the move served
    int vertex = -1;      // vertex id in the first complex
    Vec from, to;
    double margin = 0.0;  // worst face margin achieved at the new position
};

// Single-line JSON rendering of one move, for audit logs and replay.
std::string move_record_json(const MoveRecord& rec);

struct MergeResult {
    Complex merged;
    SubcomplexRef changed_region;  // merged simplices that are not verbatim input copies
    FatnessReport fatness_before_first, fatness_before_second, fatness_after;
    DisplacementSchedule schedule_used;  // empty t/delta_star when no sweep ran
    std::vector<MoveRecord> transcript;

    // changed_region points into this->merged; keep it pointing there when
    // the result moves or copies.
    MergeResult() = default;
    MergeResult(const MergeResult& o) { *this = o; }
    MergeResult(MergeResult&& o) noexcept { *this = std::move(o); }
    MergeResult& operator=(const MergeResult& o) {
        if (this == &o) return *this;
        const bool internal = o.changed_region.parent == &o.merged;
        merged = o.merged;
        changed_region = o.changed_region;
        fatness_before_first = o.fatness_before_first;
        fatness_before_second = o.fatness_before_second;
        fatness_after = o.fatness_after;
        schedule_used = o.schedule_used;
        transcript = o.transcript;
        if (internal) changed_region.parent = &merged;
        return *this;
    }
    MergeResult& operator=(MergeResult&& o) noexcept {
        if (this == &o) return *this;
        const bool internal = o.changed_region.parent == &o.merged;
        merged = std::move(o.merged);
        changed_region = std::move(o.changed_region);
        fatness_before_first = std::move(o.fatness_before_first);
        fatness_before_second = std::move(o.fatness_before_second);
        fatness_after = std::move(o.fatness_after);
        schedule_used = std::move(o.schedule_used);
        transcript = std::move(o.transcript);
        if (internal) changed_region.parent = &merged;
        return *this;
    }
};

// Raised when the sweep exhausts its displacement budget, when a remainder
// region cannot be coned, or when the output misses the fatness floor.
// Carries the transcript up to the failure and the offending simplex (vertex
// ids in the complex named by the message; empty when not simplex-specific).
struct MergeFailure : std::runtime_error {
    std::vector<MoveRecord> transcript;
    FaceKey offending;
    MergeFailure(const std::string& what, std::vector<MoveRecord> log, FaceKey simplex)
        : std::runtime_error(what), transcript(std::move(log)), offending(std::move(simplex)) {}
};

// Merge two overlapping triangulations of the same ambient space (dimension
// 2 or higher; both pure of top dimension) into one complex covering
// |c1| union |c2|. Vertices of c1 move (at most schedule step t_i in stage i,
// each move logged), c2 stays fixed; the overlap is retriangulated by the
// fat subdivision of the pairwise intersection cells and stitched to the
// untouched far fields by coning each touched simplex over its conforming
// boundary decomposition. When |c2| is already covered by c1 simplexwise the
// merge is a no-op returning c1 with an empty transcript, which also makes
// re-merging a result with either input a no-op. The merged complex passes
// validate, covers the union volume to 1e-9 relative, and keeps complex_min
// fatness above floor_fraction times the smaller input fatness; violations
// raise MergeFailure rather than degrade the result.
MergeResult merge_fat_triangulations(const Complex& c1, const Complex& c2,
                                     const MergeConfig& cfg);

// The portion of an interior triangulation usable next to a collar built by
// build_shrink_collar: every top clear of the deep collar (layers up to k3)
// and reaching past the k2 layer region, closed under faces. Tops dipping
// into the deep collar are an error listing the offenders (the caller is
// expected to subdivide and retry, not this routine).
SubcomplexRef select_interior_region(const Complex& c, const Complex& collar,
                                     const CollarRegions& regions);

// End-to-end pipeline: build a depth-1 shrink collar over `boundary`, select
// the usable part of `interior`, and merge collar with selection. The
// returned complex contains the boundary triangulation bitwise (slice-0
// collar vertices are pinned). An empty interior returns just the collar.
Complex extend_boundary_triangulation(const Complex& boundary, const Complex& interior,
                                      const MergeConfig& cfg);

}  // namespace fatmesh

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fatmesh/complex.hpp"

namespace fatmesh {

// Thresholds for the transversality predicate: delta is the angle floor
// (radians) and eta1 the length scale multiplying it in the face-distance
// clause.
struct TransversalityConfig {
    double delta = 0.3;
    double eta1 = 1.0;
    double tol = kDefaultTol;
};

// On failure, which clause broke and on which face pair (vertex indices into
// the first and second simplex as passed by the caller).
struct TransversalityWitness {
    int clause = 0;  // 0 = passed, otherwise 1 (dimension), 2 (angle), 3 (distance)
    std::vector<int> face1, face2;
    double measured = 0.0;  // observed dim / angle / distance
    double required = 0.0;  // expected dim / delta / delta*eta1
    std::string detail;
};

// Quantitative general position of two simplices: (1) their intersection has
// the transverse dimension (empty passes only when the dimensions cannot
// force a meeting), (2) the angle between their affine hulls exceeds delta,
// (3) face pairs whose dimensions sum below the ambient dimension stay
// farther apart than delta * eta1.
bool is_delta_transverse(const SimplexPoints& s1, const SimplexPoints& s2,
                         const TransversalityConfig& cfg,
                         TransversalityWitness* witness = nullptr);

// Largest angle floor at which the pair would still pass clauses (2) and (3):
// min of the hull angle and the scaled face-pair distances. Clause (1) is
// threshold-free. Returns 0 when the pair can never pass.
double transversality_margin(const SimplexPoints& s1, const SimplexPoints& s2,
                             const TransversalityConfig& cfg);

// A simplex is transverse to a set of simplices when every member it touches
// passes the pairwise predicate and every member it misses stays delta*eta1
// away.
bool transverse_to_all(const SimplexPoints& tau, const std::vector<SimplexPoints>& others,
                       const TransversalityConfig& cfg, TransversalityWitness* witness = nullptr,
                       double* margin_out = nullptr);

struct PerturbResult {
    Vec position;          // accepted vertex location
    double displacement;   // |position - original|
    double delta_star;     // worst-case measured margin over all required pairs
    int trials_used = 0;
};

// Raised when the rejection-sampling budget runs out without an acceptable
// position.
struct PerturbationFailure : std::runtime_error {
    double best_margin;
    int trials;
    PerturbationFailure(const std::string& what, double margin, int trials_)
        : std::runtime_error(what), best_margin(margin), trials(trials_) {}
};

// Move vertex v0 of c1 within eps * d1 (d1 = largest incident-simplex
// diameter) so that every star simplex through v0 is transverse to the part
// of c2 near v0, keeps fatness >= half the local floor, and clears the
// calibrated margin. Trial zero is the current position, then rejection
// samples in balls of shrinking radius. Deterministic per seed.
PerturbResult perturb_vertex_for_transversality(const Complex& c1, int v0, const Complex& c2,
                                                double eps, const TransversalityConfig& cfg,
                                                std::uint64_t seed);

// The per-skeleton displacement budget and transversality margins used by
// the merge sweep, derived from the calibrated constants.
struct DisplacementSchedule {
    std::vector<double> t;           // skeleton displacement caps, non-increasing
    std::vector<double> delta_star;  // margin after each skeleton stage
    double delta_bigstar = 0.0;      // half the worst stage margin
    double d_phi0 = 0.0;             // calibrated fatness-preserving step
    std::map<std::pair<double, double>, double> delta_fn;  // evaluations used
};

DisplacementSchedule displacement_schedule(double phi0, double d1, int n);

// Same schedule, but the margin recursion starts from transversality level
// delta0 in (0, 1] instead of 1.
DisplacementSchedule displacement_schedule(double phi0, double d1, int n, double delta0);

// Sup distance and sup differential angle between the piecewise-linear
// extensions of two vertex maps over the same complex.
struct MapApproxReport {
    double sup_distance = 0.0;
    double sup_derivative_angle = 0.0;
    bool subdivision_used = false;
};

MapApproxReport approximation_distance(const std::map<int, Vec>& f_vertices,
                                       const std::map<int, Vec>& g_vertices, const Complex& c,
                                       int samples);

}  // namespace fatmesh

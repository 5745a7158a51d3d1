#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fatmesh/geometry.hpp"

namespace fatmesh {

// Empirically calibrated constants: d_rows holds the largest displacement
// fraction (of a simplex's diameter) that kept fatness above half its
// starting floor across the trial budget; delta_rows the displacement
// fraction that preserved half the transversality level.
struct CalibrationTables {
    struct DRow {
        double phi0;
        int n;
        double d;
    };
    struct DeltaRow {
        double phi;
        double delta;
        double d;
    };
    std::vector<DRow> d_rows;
    std::vector<DeltaRow> delta_rows;
    int trials = 0;
    std::uint64_t seed = 0;

    std::string version_hash() const;  // FNV-1a of the canonical CSV text
};

// Table baked from the shipped calibration run (regenerate with the CLI).
const CalibrationTables& builtin_calibration();

// Conservative lookups: nearest grid row at or below the query, never under
// the analytic floors phi0/(4n) resp. delta*phi/16, capped at 1/2.
double lookup_d_phi0(const CalibrationTables& t, double phi0, int n);
double lookup_delta_fn(const CalibrationTables& t, double phi, double delta);

// Margin left after moving a delta_prev-transverse configuration by the
// fraction r of its diameter; the schedule recursion step.
double delta_star_fn(double phi0, double delta_prev, double r);

// Largest fatness any n-simplex can have (the regular simplex's value);
// calibration rows beyond it are vacuous and default to the 1/2 cap.
double max_simplex_fatness(int n);

// A random n-simplex with fatness close to phi_target and unit diameter,
// found by interpolating between a Gaussian draw and the regular simplex.
// Empty when the target exceeds the dimension's maximum.
SimplexPoints random_fat_simplex(std::mt19937_64& rng, int n, double phi_target);

// Run the displacement trials over the standard grids (or caller-supplied
// ones). Heavy at the default budget; tests pass a reduced trial count. The
// shipped tables are smoothed monotone non-decreasing in the fatness column
// by a descending running minimum, which never claims more displacement than
// was measured.
CalibrationTables run_calibration(int trials, std::uint64_t seed);
CalibrationTables run_calibration(int trials, std::uint64_t seed,
                                  const std::vector<double>& phi_grid,
                                  const std::vector<int>& dims);

// Canonical CSV serializations (and their parsers) for the shipped tables.
std::string to_csv_d(const CalibrationTables& t);
std::string to_csv_delta(const CalibrationTables& t);
CalibrationTables from_csv(const std::string& d_csv, const std::string& delta_csv);

// Lowest fatness produced by Chebyshev-center subdivision over seeded
// transverse overlap cells, per (ambient dim, fatness floor, angle floor),
// together with the worst observed cell volume and inradius relative to the
// smaller simplex's diameter — the empirical stand-ins for the existence
// constants of the overlap analysis.
struct SubdivisionFloor {
    int m;
    double phi0;
    double delta;
    double floor;
    double vol_ratio;
    double rho_ratio;
};

std::vector<SubdivisionFloor> run_subdivision_floors(int pairs, std::uint64_t seed);
std::string to_csv_floors(const std::vector<SubdivisionFloor>& rows);

}  // namespace fatmesh

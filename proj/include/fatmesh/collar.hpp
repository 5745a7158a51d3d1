#pragma once

#include <stdexcept>
#include <string>

#include "fatmesh/complex.hpp"

namespace fatmesh {

// Parameters of a prism collar over a boundary triangulation: n0 layers
// tile the unit interval, of which [0, depth] is actually built, and
// vertical_scale stretches the interval to a geometric height.
struct CollarSpec {
    int n0 = 1;
    double depth = 1.0;
    double target_phi = 0.1;
    double vertical_scale = 1.0;
};

// Layer indices splitting the collar into its working regions, outermost
// (k1) to innermost (k4).
struct CollarRegions {
    int k1 = 0;
    int k2 = 0;
    int k3 = 0;
    int k4 = 0;
};

// Raised when no layer geometry can reach the requested fatness (or
// diameter) bound; carries the best fatness any probed geometry achieved.
struct CollarInfeasible : std::runtime_error {
    double best_phi;
    CollarInfeasible(const std::string& what, double phi)
        : std::runtime_error(what), best_phi(phi) {}
};

// Triangulate |J| x [0, depth] with one extra ambient coordinate for the
// height. Each prism over a top simplex is split by the vertex-order
// staircase rule, so horizontal slices stay unsubdivided copies of J and
// neighboring prisms agree on shared vertical faces.
Complex build_prism_complex(const Complex& J, const CollarSpec& spec);

// Search for the cheapest collar spec whose prisms meet target_phi and stay
// below the diameter bound. Layer height is tuned by doubling plus bisection
// starting from the median boundary edge length; the layer count then covers
// a unit-height collar. Throws CollarInfeasible when no height works.
CollarSpec choose_n0(const Complex& J, double target_phi, double interior_diam_bound);

// The four region cut indices k1 >= k2 >= k3 >= k4 used by the merge
// pipeline. Requires n0 >= 6 so the floors are positive and ordered.
CollarRegions collar_regions(const CollarSpec& spec);

// Realize the collar inside the boundary's own ambient space by shrinking
// each layer radially toward `center` (factor 1 - t * shrink at parameter
// height t). Requires |J| star-shaped around the center; same combinatorics
// as build_prism_complex.
Complex build_shrink_collar(const Complex& J, const CollarSpec& spec, const Vec& center,
                            double shrink);

}  // namespace fatmesh

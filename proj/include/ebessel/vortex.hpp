#pragma once

#include <utility>
#include <vector>

#include "ebessel/field.hpp"
#include "ebessel/grid.hpp"

namespace ebessel {

struct Vortex {
    double x_px = 0.0;
    double y_px = 0.0;
    int charge = 0;
};

struct VortexMap {
    std::vector<Vortex> vortices;
    int loop_size_px = 5;
    double amplitude_floor = 1e-3;
    long skipped_loops = 0;
};

// Branch-free phase differences: each component is the argument of the ratio
// of neighboring unit phasors, valued in (-pi, pi] per pixel step. The last
// column/row replicates the preceding difference so linear phases map to a
// constant gradient everywhere.
std::pair<RealGrid, RealGrid> periodic_gradient(const RealGrid& phase);

// Evaluates the discrete loop integral of the periodic phase gradient around
// every interior pixel on a counter-clockwise square contour of side
// loop_size_px. Pixels whose loop winds through amplitude below
// amplitude_floor times the peak are skipped and tallied. Adjacent detections
// of equal charge are merged by 8-connected clustering; the reported position
// is the amplitude-weighted centroid in pixel coordinates.
VortexMap winding_numbers(const Field2D& field, int loop_size_px = 5,
                          double amplitude_floor = 1e-3);

// Sum of charges within a disk of radius_px around (cx_px, cy_px).
int total_charge(const VortexMap& map, double cx_px, double cy_px,
                 double radius_px);

}  // namespace ebessel

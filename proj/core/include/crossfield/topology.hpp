#pragma once

#include <optional>
#include <vector>

#include "crossfield/field.hpp"
#include "crossfield/geometry.hpp"
#include "crossfield/polygon.hpp"

namespace crossfield {

struct SeparatrixSeed {
    Vec2 point;
    Vec2 direction;  // unit, outward radial at the cell-boundary root
};

struct Singularity {
    Vec2 position;
    double index = 0.0;  // quarter-integer k/4
    int cell_i = 0;
    int cell_j = 0;
    bool localized = false;  // false => fell back to the cell center
    bool seed_count_mismatch = false;
    std::vector<SeparatrixSeed> seeds;
};

enum class TraceStop { boundary, singularity, max_length, left_domain, stagnant };

struct Streamline {
    std::vector<Vec2> points;
    TraceStop stop = TraceStop::max_length;
    int seed_singularity = -1;      // index into the singularity list
    int terminal_singularity = -1;  // >= 0 when stop == singularity
    double length = 0.0;
};

struct Cell {
    int i = 0;
    int j = 0;
};

// Candidate singular cells: strict local maxima of the per-cell Dirichlet
// energy (bilinear interpolant, 2x2 Gauss quadrature) over the 3x3 cell
// neighborhood, restricted to interior cells (all 4 corners masked) and kept
// only when the winding around the cell is nonzero.
std::vector<Cell> detect_singular_cells(const VectorField2& u, const ScalarField& mask);

// Cross-field index: principal-value winding of arg(u) around a square node
// loop at Chebyshev distance ring_cells from the cell, divided by 2*pi and
// rounded to the nearest integer w; returns w/4. Throws AmbiguousWinding when
// |w - raw| > 0.2.
double winding_index(const VectorField2& u, const Cell& cell, int ring_cells = 2);

// Zero of the bilinear interpolant inside the cell (closed form); falls back
// to the cell center with localized=false when no interior root exists.
struct LocalizedZero {
    Vec2 position;
    bool interior_root = true;
};
LocalizedZero localize_zero(const VectorField2& u, const Cell& cell);

// Separatrix seeds on the singular cell boundary: roots of the alignment
// function between a cross branch and the radial direction, bisection-refined
// to 1e-3*h. Expected count is 4 - 4*index.
std::vector<SeparatrixSeed> separatrix_seeds(const VectorField2& u, const Cell& cell,
                                             const Vec2& s0, int samples_per_edge = 64);

// Full detection pass: detect cells, classify indices, localize zeros, and
// compute seeds. Cells whose winding is ambiguous are skipped.
std::vector<Singularity> find_singularities(const VectorField2& u, const ScalarField& mask);

// Pseudometric on cross angles mod pi/2; range [0, pi/4].
double d_cross(double theta1, double theta2);

struct TraceOptions {
    double step_size = 0.0;     // default h/2 when 0
    double stop_radius = 0.0;   // default 2h when 0
    double max_length = 0.0;    // default 4L when 0
};

// RK4 streamline in the branch-consistent cross direction field. Terminates
// on: crossing the polygon boundary (clipped to the exact intersection),
// entering stop_radius of a singularity (endpoint snapped there), exceeding
// max_length, or stagnating (branch flapping).
Streamline trace_streamline(const Vec2& seed_point, const Vec2& seed_direction,
                            const VectorField2& u, const std::vector<Singularity>& singularities,
                            const PolygonBoundary& polygon, const TraceOptions& opts = {});

// Traces every seed of every singularity.
std::vector<Streamline> trace_all_separatrices(const std::vector<Singularity>& singularities,
                                               const VectorField2& u,
                                               const PolygonBoundary& polygon,
                                               const TraceOptions& opts = {});

// Advisory boundary-defect report for sharp polygon corners: winding of the
// field along an interior half-loop around the corner, relative to the turn
// of the boundary tangents. The paper gives no boundary-winding definition,
// so this is diagnostic output only.
struct BoundaryDefect {
    Vec2 position;
    int vertex = 0;
    double interior_angle = 0.0;   // radians
    double half_loop_index = 0.0;  // advisory quarter-index estimate
};
std::vector<BoundaryDefect> boundary_defects(const VectorField2& u, const PolygonBoundary& polygon,
                                             double min_turn_angle = M_PI / 8.0,
                                             double loop_radius = 0.0);

// Winding of arg(u) along an arbitrary closed polyline (bilinear field
// interpolation), in representation-field turns. Detected interior indices
// inside the loop must sum to this value / 4.
double loop_winding(const VectorField2& u, const std::vector<Vec2>& loop);

// Bilinear interpolation of u at a physical point.
Vec2 sample_field(const VectorField2& u, const Vec2& p);

}  // namespace crossfield

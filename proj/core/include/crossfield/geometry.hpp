#pragma once

#include <vector>

#include "crossfield/field.hpp"
#include "crossfield/polygon.hpp"

namespace crossfield {

class SpectralPlan;

// Node-sampled indicator of the polygon interior (even-odd rule). Nodes on an
// edge count as inside. Requires the polygon to sit inside the grid square
// with a margin of at least 5h; throws PolygonOutOfBounds otherwise.
ScalarField rasterize_indicator(const PolygonBoundary& polygon, const PeriodicGrid& grid);

// phi = G_eps * chi, computed spectrally (multiplier e^{-eps^2 |xi|^2 / 2}),
// then clamped to [0,1] to kill spectral ringing. The plan-taking overload
// reuses an existing transform plan.
ScalarField phase_field(const ScalarField& indicator, double eps);
ScalarField phase_field(const SpectralPlan& plan, const ScalarField& indicator, double eps);

// B(phi) = phi^2 (1-phi)^2, the diffuse surrogate of the boundary delta.
ScalarField boundary_weight(const ScalarField& phi);

// Per-vertex representation vectors g = (cos 4*theta_n, sin 4*theta_n) of the
// outward normal angle theta_n, averaged at corners by the angle bisector of
// the two adjacent edge normals. Throws DegenerateCorner when adjacent edges
// are antiparallel within 1e-9 rad.
std::vector<Vec2> boundary_cross_data(const PolygonBoundary& polygon);

struct ClosestPoint {
    Vec2 foot;
    int segment = 0;
    double alpha = 0.0;  // foot = (1-alpha)*p_i + alpha*p_{i+1}
    double distance = 0.0;
};

// Closest point on the polygon over all segments; ties broken by the lowest
// segment index.
ClosestPoint closest_segment_projection(const Vec2& point, const PolygonBoundary& polygon);

// Extends per-vertex boundary data into the tubular band dist(x,Gamma) < band
// by closest-segment interpolation (zero outside the band), then mollifies
// spectrally with G_sigma. The result is not renormalized; its magnitude
// decays away from the boundary. Throws EmptyBand when band < h.
VectorField2 extend_boundary_data(const PolygonBoundary& polygon,
                                  const std::vector<Vec2>& vertex_data,
                                  const PeriodicGrid& grid, double band, double sigma);
VectorField2 extend_boundary_data(const SpectralPlan& plan, const PolygonBoundary& polygon,
                                  const std::vector<Vec2>& vertex_data, double band,
                                  double sigma);

// Interior mask: 1 where phi > 0.5.
ScalarField interior_mask(const ScalarField& phi);

}  // namespace crossfield

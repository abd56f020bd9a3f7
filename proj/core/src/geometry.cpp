#include "crossfield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crossfield/errors.hpp"
#include "crossfield/spectral.hpp"

namespace crossfield {

namespace {

// Even-odd crossing test with an on-edge tolerance; nodes on an edge count as
// inside.
bool point_inside_even_odd(const Vec2& p, const PolygonBoundary& poly, double edge_tol) {
    int n = poly.size();
    for (int i = 0; i < n; ++i) {
        Vec2 a = poly.segment_start(i);
        Vec2 b = poly.segment_end(i);
        Vec2 ab = b - a;
        double t = std::clamp((p - a).dot(ab) / ab.norm2(), 0.0, 1.0);
        if ((p - (a + ab * t)).norm() <= edge_tol) return true;
    }
    bool inside = false;
    for (int i = 0; i < n; ++i) {
        Vec2 a = poly.segment_start(i);
        Vec2 b = poly.segment_end(i);
        if ((a.y > p.y) != (b.y > p.y)) {
            double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

ScalarField rasterize_indicator(const PolygonBoundary& polygon, const PeriodicGrid& grid) {
    Vec2 lo, hi;
    polygon.bounding_box(lo, hi);
    double margin = 5.0 * grid.spacing();
    double half = 0.5 * grid.side_length();
    if (lo.x < -half + margin || lo.y < -half + margin || hi.x > half - margin ||
        hi.y > half - margin) {
        std::ostringstream os;
        os << "polygon must fit inside the grid square with a margin of 5h = " << margin;
        throw PolygonOutOfBounds(os.str());
    }

    ScalarField chi(grid, 0.0);
    double edge_tol = 1e-12 * grid.side_length();
    int n = grid.resolution();
    // Nodes outside the inflated bounding box are outside the polygon.
    for (int j = 0; j < n; ++j) {
        double y = grid.y(j);
        if (y < lo.y - edge_tol || y > hi.y + edge_tol) continue;
        for (int i = 0; i < n; ++i) {
            double x = grid.x(i);
            if (x < lo.x - edge_tol || x > hi.x + edge_tol) continue;
            if (point_inside_even_odd({x, y}, polygon, edge_tol)) chi.at(i, j) = 1.0;
        }
    }
    return chi;
}

ScalarField phase_field(const ScalarField& indicator, double eps) {
    SpectralPlan plan(indicator.grid());
    return phase_field(plan, indicator, eps);
}

ScalarField phase_field(const SpectralPlan& plan, const ScalarField& indicator, double eps) {
    if (!(eps > 0.0)) throw InvalidArgument("phase_field: eps must be > 0");
    ScalarField phi = gaussian_filter(plan, indicator, eps);
    for (double& v : phi.data()) v = std::clamp(v, 0.0, 1.0);
    return phi;
}

ScalarField boundary_weight(const ScalarField& phi) {
    ScalarField b(phi.grid());
    const auto& in = phi.data();
    auto& out = b.data();
    for (std::size_t k = 0; k < in.size(); ++k) {
        double p = in[k];
        out[k] = p * p * (1.0 - p) * (1.0 - p);
    }
    return b;
}

std::vector<Vec2> boundary_cross_data(const PolygonBoundary& polygon) {
    int n = polygon.size();
    std::vector<Vec2> data(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Outward normals of the two edges meeting at vertex i (CCW polygon:
        // outward normal of a->b is (dy, -dx)).
        Vec2 e_prev = (polygon.vertex(i) - polygon.vertex(i - 1)).normalized();
        Vec2 e_next = (polygon.vertex(i + 1) - polygon.vertex(i)).normalized();
        Vec2 n_prev{e_prev.y, -e_prev.x};
        Vec2 n_next{e_next.y, -e_next.x};
        Vec2 bisector = n_prev + n_next;
        if (bisector.norm() < 1e-9) {
            std::ostringstream os;
            os << "antiparallel edges at vertex " << i;
            throw DegenerateCorner(os.str());
        }
        double theta_n = bisector.angle();
        data[std::size_t(i)] = {std::cos(4.0 * theta_n), std::sin(4.0 * theta_n)};
    }
    return data;
}

ClosestPoint closest_segment_projection(const Vec2& point, const PolygonBoundary& polygon) {
    ClosestPoint best;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < polygon.size(); ++i) {
        Vec2 a = polygon.segment_start(i);
        Vec2 ab = polygon.segment_end(i) - a;
        double alpha = std::clamp((point - a).dot(ab) / ab.norm2(), 0.0, 1.0);
        Vec2 foot = a + ab * alpha;
        double d2 = (point - foot).norm2();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = {foot, i, alpha, std::sqrt(d2)};
        }
    }
    return best;
}

VectorField2 extend_boundary_data(const PolygonBoundary& polygon,
                                  const std::vector<Vec2>& vertex_data, const PeriodicGrid& grid,
                                  double band, double sigma) {
    SpectralPlan plan(grid);
    return extend_boundary_data(plan, polygon, vertex_data, band, sigma);
}

VectorField2 extend_boundary_data(const SpectralPlan& plan, const PolygonBoundary& polygon,
                                  const std::vector<Vec2>& vertex_data, double band,
                                  double sigma) {
    const PeriodicGrid& grid = plan.grid();
    if (int(vertex_data.size()) != polygon.size())
        throw InvalidArgument("extend_boundary_data: one data vector per polygon vertex");
    if (!(sigma > 0.0)) throw InvalidArgument("extend_boundary_data: sigma must be > 0");
    if (band < grid.spacing())
        throw EmptyBand("band half-width below grid spacing leaves no reliable band nodes");

    int n = grid.resolution();
    std::vector<double> best_d2(std::size_t(grid.node_count()),
                                std::numeric_limits<double>::infinity());
    VectorField2 g(grid);

    // Per segment, stamp the nodes inside its band-inflated bounding box and
    // keep the closest segment per node. Iterating segments in index order
    // makes the lowest index win ties.
    for (int s = 0; s < polygon.size(); ++s) {
        Vec2 a = polygon.segment_start(s);
        Vec2 b = polygon.segment_end(s);
        Vec2 ab = b - a;
        double lo_x = std::min(a.x, b.x) - band, hi_x = std::max(a.x, b.x) + band;
        double lo_y = std::min(a.y, b.y) - band, hi_y = std::max(a.y, b.y) + band;
        int i0 = int(std::ceil(grid.to_grid_x(lo_x)));
        int i1 = int(std::floor(grid.to_grid_x(hi_x)));
        int j0 = int(std::ceil(grid.to_grid_y(lo_y)));
        int j1 = int(std::floor(grid.to_grid_y(hi_y)));
        i0 = std::max(i0, 0);
        i1 = std::min(i1, n - 1);
        j0 = std::max(j0, 0);
        j1 = std::min(j1, n - 1);
        const Vec2& va = vertex_data[std::size_t(s)];
        const Vec2& vb = vertex_data[std::size_t(polygon.wrap(s + 1))];
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                Vec2 p = grid.node(i, j);
                double alpha = std::clamp((p - a).dot(ab) / ab.norm2(), 0.0, 1.0);
                Vec2 foot = a + ab * alpha;
                double d2 = (p - foot).norm2();
                if (d2 > band * band) continue;
                std::size_t idx = std::size_t(grid.index(i, j));
                if (d2 < best_d2[idx]) {
                    best_d2[idx] = d2;
                    g.set(i, j, va * (1.0 - alpha) + vb * alpha);
                }
            }
        }
    }

    bool any = false;
    for (double d2 : best_d2)
        if (d2 < std::numeric_limits<double>::infinity()) {
            any = true;
            break;
        }
    if (!any) throw EmptyBand("no grid node falls within the boundary band");

    VectorField2 smoothed = gaussian_filter(plan, g, sigma);
    if (!smoothed.all_finite()) throw Error("extend_boundary_data: non-finite output");
    return smoothed;
}

ScalarField interior_mask(const ScalarField& phi) {
    ScalarField m(phi.grid());
    const auto& in = phi.data();
    auto& out = m.data();
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = in[k] > 0.5 ? 1.0 : 0.0;
    return m;
}

}  // namespace crossfield

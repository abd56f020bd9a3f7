#include <doctest.h>

#include <cmath>

#include "crossfield/errors.hpp"
#include "crossfield/geometry.hpp"
#include "crossfield/spectral.hpp"
#include "crossfield/validation.hpp"

using namespace crossfield;

TEST_CASE("rasterize_indicator: axis-aligned square") {
    PeriodicGrid grid(64, 2.0 * M_PI);
    PolygonBoundary square = make_rectangle_polygon({-1.0, -1.0}, {1.0, 1.0});
    ScalarField chi = rasterize_indicator(square, grid);

    // Containment by definition: chi sums to the count of nodes with
    // max(|x|,|y|) <= 1 (nodes on the edge count as inside).
    int expected = 0;
    for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i)
            if (std::max(std::fabs(grid.x(i)), std::fabs(grid.y(j))) <= 1.0 + 1e-12) ++expected;
    CHECK(chi.sum() == doctest::Approx(double(expected)));

    // Interior node at the origin.
    CHECK(chi.at(32, 32) == 1.0);
    // Node far outside the bounding box.
    CHECK(chi.at(2, 2) == 0.0);
}

TEST_CASE("rasterize_indicator agrees with winding-number reference") {
    PeriodicGrid grid(48, 2.0 * M_PI);
    PolygonBoundary disk = make_circle_polygon({0.3, -0.2}, 1.1, 64);
    ScalarField chi = rasterize_indicator(disk, grid);
    for (int j = 0; j < 48; ++j) {
        for (int i = 0; i < 48; ++i) {
            Vec2 p = grid.node(i, j);
            // Skip near-edge nodes where the two rules' tie-breaking differs.
            if (std::fabs(closest_segment_projection(p, disk).distance) < 1e-9) continue;
            CHECK(chi.at(i, j) == (point_in_polygon_winding(p, disk) ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("rasterize_indicator: disk area within 2% of pi") {
    PeriodicGrid grid(64, 2.0 * M_PI);
    PolygonBoundary disk = make_circle_polygon({0.0, 0.0}, 1.0, 256);
    ScalarField chi = rasterize_indicator(disk, grid);
    double h2 = grid.spacing() * grid.spacing();
    CHECK(chi.sum() * h2 == doctest::Approx(M_PI).epsilon(0.02));
}

TEST_CASE("rasterize_indicator: bounds and validation errors") {
    PeriodicGrid grid(64, 2.0 * M_PI);
    CHECK_THROWS_AS(rasterize_indicator(make_rectangle_polygon({-3.1, -1.0}, {1.0, 1.0}), grid),
                    PolygonOutOfBounds);
    // Bowtie self-intersection.
    CHECK_THROWS_AS(PolygonBoundary({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), NonSimplePolygon);
    // Duplicate consecutive vertices.
    CHECK_THROWS_AS(PolygonBoundary({{0, 0}, {0, 0}, {1, 0}, {1, 1}}), NonSimplePolygon);
}

TEST_CASE("phase_field: constant indicators are fixed points") {
    PeriodicGrid grid(32, 2.0 * M_PI);
    ScalarField ones(grid, 1.0);
    ScalarField phi1 = phase_field(ones, 4.0 * grid.spacing());
    for (double v : phi1.data()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    ScalarField zeros(grid, 0.0);
    ScalarField phi0 = phase_field(zeros, 4.0 * grid.spacing());
    for (double v : phi0.data()) CHECK(std::fabs(v) < 1e-12);
}

TEST_CASE("phase_field: straight-boundary profile matches the erf oracle") {
    PeriodicGrid grid(64, 2.0 * M_PI);
    double h = grid.spacing();
    double eps = 4.0 * h;
    // Rectangle with its right edge on x = 0; tall enough that the node row
    // through y = 0 sees an effectively straight boundary.
    PolygonBoundary rect = make_rectangle_polygon({-2.5, -2.5}, {0.0, 2.5});
    ScalarField chi = rasterize_indicator(rect, grid);
    ScalarField phi = phase_field(chi, eps);

    // 1D error-function profile of the half-plane x < 0: the quadrature of
    // G_eps against the half-plane gives 0.5*erfc(x/(sqrt(2) eps)).
    int j0 = 32;  // y = 0
    auto expected = [&](double x) { return 0.5 * std::erfc(x / (std::sqrt(2.0) * eps)); };
    CHECK(std::fabs(phi.at(32, j0) - 0.5) < 0.01);       // node exactly on the line
    CHECK(std::fabs(phi.at(33, j0) - expected(h)) < 0.01);
    CHECK(std::fabs(phi.at(30, j0) - expected(-2 * h)) < 0.01);
}

TEST_CASE("phase_field: monotone in the indicator") {
    PeriodicGrid grid(48, 2.0 * M_PI);
    double eps = 4.0 * grid.spacing();
    ScalarField a = rasterize_indicator(make_rectangle_polygon({-1, -1}, {1, 1}), grid);
    ScalarField b = rasterize_indicator(make_rectangle_polygon({-1.8, -1.8}, {1.8, 1.8}), grid);
    ScalarField pa = phase_field(a, eps);
    ScalarField pb = phase_field(b, eps);
    for (std::size_t k = 0; k < pa.data().size(); ++k)
        CHECK(pa.data()[k] <= pb.data()[k] + 1e-10);
}

TEST_CASE("boundary_weight algebra") {
    PeriodicGrid grid(16, 1.0);
    ScalarField phi(grid);
    phi.at(0, 0) = 0.5;
    phi.at(1, 0) = 0.0;
    phi.at(2, 0) = 1.0;
    phi.at(3, 0) = 0.25;
    ScalarField b = boundary_weight(phi);
    CHECK(b.at(0, 0) == doctest::Approx(1.0 / 16.0));
    CHECK(b.at(1, 0) == 0.0);
    CHECK(b.at(2, 0) == 0.0);
    CHECK(b.at(3, 0) == doctest::Approx(0.03515625));
    for (double v : b.data()) CHECK(v <= 1.0 / 16.0 + 1e-15);
}

namespace {

// Square with edge-midpoint vertices so midpoints carry their own data.
PolygonBoundary square_with_midpoints() {
    return PolygonBoundary({{1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}});
}

}  // namespace

TEST_CASE("boundary_cross_data: representative angles") {
    PolygonBoundary poly = square_with_midpoints();
    auto data = boundary_cross_data(poly);

    // Midpoint of the right edge: theta_n = 0 -> (1, 0).
    CHECK(data[1].x == doctest::Approx(1.0));
    CHECK(data[1].y == doctest::Approx(0.0).epsilon(1e-12));
    // Midpoint of the top edge: theta_n = pi/2, same cross -> (1, 0).
    CHECK(data[3].x == doctest::Approx(1.0));
    CHECK(std::fabs(data[3].y) < 1e-12);

    for (const Vec2& g : data) CHECK(g.norm() == doctest::Approx(1.0));
}

TEST_CASE("boundary_cross_data: 45-degree edge maps to (-1, 0)") {
    // Diamond with a midpoint vertex on the upper-right edge.
    PolygonBoundary diamond({{2, 0}, {1, 1}, {0, 2}, {-2, 0}, {0, -2}});
    auto data = boundary_cross_data(diamond);
    // Vertex 1 joins two collinear edges with outward normal at pi/4.
    CHECK(data[1].x == doctest::Approx(-1.0));
    CHECK(std::fabs(data[1].y) < 1e-12);
}

TEST_CASE("boundary_cross_data: quarter-turn invariance") {
    PolygonBoundary poly({{1.3, -0.9}, {1.1, 0.8}, {-0.2, 1.2}, {-1.4, 0.1}, {-0.6, -1.1}});
    std::vector<Vec2> rotated_verts;
    for (const Vec2& v : poly.vertices()) rotated_verts.push_back({-v.y, v.x});
    PolygonBoundary rot(rotated_verts);
    auto a = boundary_cross_data(poly);
    auto b = boundary_cross_data(rot);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].x == doctest::Approx(b[k].x).epsilon(1e-9));
        CHECK(a[k].y == doctest::Approx(b[k].y).epsilon(1e-9));
    }
}

TEST_CASE("boundary_cross_data: degenerate spike") {
    PolygonBoundary spike({{0, 0}, {2, 0}, {1, 1e-11}, {0, 1}});
    CHECK_THROWS_AS(boundary_cross_data(spike), DegenerateCorner);
}

TEST_CASE("closest_segment_projection basics") {
    PolygonBoundary square = make_rectangle_polygon({-0.5, -0.5}, {0.5, 0.5});

    ClosestPoint on_vertex = closest_segment_projection({0.5, -0.5}, square);
    CHECK(on_vertex.distance == doctest::Approx(0.0));
    CHECK((on_vertex.alpha == doctest::Approx(0.0) || on_vertex.alpha == doctest::Approx(1.0)));

    ClosestPoint cp = closest_segment_projection({2.0, 0.0}, square);
    CHECK(cp.foot.x == doctest::Approx(0.5));
    CHECK(cp.foot.y == doctest::Approx(0.0));
    CHECK(cp.distance == doctest::Approx(1.5));
}

TEST_CASE("closest_segment_projection matches exhaustive oracle") {
    PolygonBoundary poly({{1.2, -0.7}, {0.9, 0.9}, {-0.4, 1.3}, {-1.2, -0.2}, {0.1, -1.4}});
    SplitMix64 rng(42);
    for (int t = 0; t < 200; ++t) {
        Vec2 p{3.0 * rng.next_symmetric(), 3.0 * rng.next_symmetric()};
        // Independent per-segment minimization.
        double best_d = 1e300;
        int best_seg = -1;
        double best_alpha = 0.0;
        for (int s = 0; s < poly.size(); ++s) {
            Vec2 a = poly.segment_start(s), b = poly.segment_end(s);
            Vec2 ab = b - a;
            double alpha = (p - a).dot(ab) / ab.norm2();
            alpha = std::min(1.0, std::max(0.0, alpha));
            double d = (p - (a + ab * alpha)).norm();
            if (d < best_d) {
                best_d = d;
                best_seg = s;
                best_alpha = alpha;
            }
        }
        ClosestPoint cp = closest_segment_projection(p, poly);
        CHECK(cp.segment == best_seg);
        CHECK(cp.distance == doctest::Approx(best_d).epsilon(1e-14));
        CHECK(cp.alpha == doctest::Approx(best_alpha).epsilon(1e-12));
    }
}

TEST_CASE("extend_boundary_data: straight edge with constant data") {
    PeriodicGrid grid(64, 2.0 * M_PI);
    double h = grid.spacing();
    PolygonBoundary rect = make_rectangle_polygon({-2.0, -2.0}, {2.0, 2.0});
    PolygonBoundary fine = resample_polygon(rect, h / 2.0);
    std::vector<Vec2> data(std::size_t(fine.size()), Vec2{1.0, 0.0});
    VectorField2 g = extend_boundary_data(fine, data, grid, 6.0 * h, 2.0 * h);

    // Node on the bottom boundary mid-edge: direction exactly (1,0) since the
    // second component is identically zero.
    int j_bot = 0;
    for (int j = 0; j < 64; ++j)
        if (std::fabs(grid.y(j) + 2.0) < 1e-12) j_bot = j;
    Vec2 v = g.at(32, j_bot);
    CHECK(v.y == 0.0);
    CHECK(v.x > 0.5);
    CHECK(v.norm() <= 1.0 + 1e-12);

    // Far from the boundary the Gaussian tail is below 1e-6.
    CHECK(g.at(32, 32).norm() < 1e-6);
}

TEST_CASE("extend_boundary_data: EmptyBand when band < h") {
    PeriodicGrid grid(32, 2.0 * M_PI);
    PolygonBoundary rect = make_rectangle_polygon({-1.5, -1.5}, {1.5, 1.5});
    std::vector<Vec2> data(4, Vec2{1.0, 0.0});
    CHECK_THROWS_AS(extend_boundary_data(rect, data, grid, 0.5 * grid.spacing(), grid.spacing()),
                    EmptyBand);
}

TEST_CASE("extend_boundary_data: square cross data vs spatial convolution oracle") {
    PeriodicGrid grid(64, 2.0 * M_PI);
    double h = grid.spacing();
    double band = 6.0 * h, sigma = 2.0 * h;
    PolygonBoundary square = make_rectangle_polygon({-1.5, -1.5}, {1.5, 1.5});
    PolygonBoundary fine = resample_polygon(square, h / 2.0);
    auto data = boundary_cross_data(fine);
    VectorField2 g = extend_boundary_data(fine, data, grid, band, sigma);

    // Direct spatial-domain oracle: raw band field then truncated Gaussian
    // convolution, all in physical space.
    int n = grid.resolution();
    VectorField2 raw(grid);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            Vec2 p = grid.node(i, j);
            ClosestPoint cp = closest_segment_projection(p, fine);
            if (cp.distance >= band) continue;
            Vec2 va = data[std::size_t(cp.segment)];
            Vec2 vb = data[std::size_t(fine.wrap(cp.segment + 1))];
            raw.set(i, j, va * (1.0 - cp.alpha) + vb * cp.alpha);
        }
    }
    int reach = int(std::ceil(8.0 * sigma / h));
    auto oracle_at = [&](int i, int j) {
        Vec2 acc{0.0, 0.0};
        double norm = 1.0 / (2.0 * M_PI * sigma * sigma);
        for (int dj = -reach; dj <= reach; ++dj)
            for (int di = -reach; di <= reach; ++di) {
                double r2 = (di * di + dj * dj) * h * h;
                double w = norm * std::exp(-r2 / (2.0 * sigma * sigma)) * h * h;
                acc += raw.at(i + di, j + dj) * w;
            }
        return acc;
    };

    // Edge midpoints: bottom edge has rep vector (1, 0).
    int i_mid = 32;
    int j_bot = 0;
    for (int j = 0; j < n; ++j)
        if (std::fabs(grid.y(j) + 1.5) < 1e-12) j_bot = j;
    Vec2 got = g.at(i_mid, j_bot);
    Vec2 oracle = oracle_at(i_mid, j_bot);
    CHECK(std::fabs(std::atan2(got.y, got.x)) < 0.05);
    CHECK(std::fabs(std::atan2(oracle.y, oracle.x)) < 0.05);
    // Spectral and spatial paths agree where the band is far from wrap-around.
    CHECK(got.x == doctest::Approx(oracle.x).epsilon(0.02));
}

TEST_CASE("extend_boundary_data is linear in the vertex data") {
    PeriodicGrid grid(32, 2.0 * M_PI);
    double h = grid.spacing();
    PolygonBoundary poly = make_circle_polygon({0, 0}, 1.0, 48);
    SplitMix64 rng(7);
    std::vector<Vec2> v(std::size_t(poly.size())), w(std::size_t(poly.size()));
    for (auto& x : v) x = Vec2{rng.next_symmetric(), rng.next_symmetric()}.normalized();
    for (auto& x : w) x = Vec2{rng.next_symmetric(), rng.next_symmetric()}.normalized();
    double a = 0.7, b = -1.3;
    std::vector<Vec2> mix(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) mix[k] = v[k] * a + w[k] * b;

    VectorField2 ev = extend_boundary_data(poly, v, grid, 4 * h, h);
    VectorField2 ew = extend_boundary_data(poly, w, grid, 4 * h, h);
    VectorField2 em = extend_boundary_data(poly, mix, grid, 4 * h, h);
    for (std::size_t k = 0; k < em.comp1().size(); ++k) {
        CHECK(em.comp1()[k] ==
              doctest::Approx(a * ev.comp1()[k] + b * ew.comp1()[k]).epsilon(1e-10));
        CHECK(em.comp2()[k] ==
              doctest::Approx(a * ev.comp2()[k] + b * ew.comp2()[k]).epsilon(1e-10));
    }
}

TEST_CASE("resample_polygon keeps vertices and bounds edge length") {
    PolygonBoundary square = make_rectangle_polygon({0, 0}, {1, 1});
    PolygonBoundary fine = resample_polygon(square, 0.3);
    CHECK(fine.size() == 16);
    for (int i = 0; i < fine.size(); ++i)
        CHECK((fine.segment_end(i) - fine.segment_start(i)).norm() <= 0.3 + 1e-12);
}

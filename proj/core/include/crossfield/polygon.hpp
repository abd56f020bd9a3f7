#pragma once

#include <string>
#include <vector>

#include "crossfield/grid.hpp"

namespace crossfield {

// Closed, simple, counterclockwise polyline describing the physical boundary.
// Validation (consecutive-vertex separation, simplicity, orientation) runs at
// construction; a polygon object is immutable afterwards.
class PolygonBoundary {
  public:
    explicit PolygonBoundary(std::vector<Vec2> vertices);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    int size() const { return int(vertices_.size()); }

    Vec2 vertex(int i) const { return vertices_[std::size_t(wrap(i))]; }
    // Segment i runs vertex(i) -> vertex(i+1).
    Vec2 segment_start(int i) const { return vertex(i); }
    Vec2 segment_end(int i) const { return vertex(i + 1); }

    double signed_area() const;
    double perimeter() const;
    void bounding_box(Vec2& lo, Vec2& hi) const;

    // Exterior turn angle at each vertex (positive = left/convex for a CCW
    // polygon); sums to 2*pi over the closed loop.
    double turn_angle(int i) const;

    // Vertices whose |turn angle| exceeds the threshold; sharp geometric
    // corners as opposed to samples of a smooth curve.
    std::vector<int> corner_vertices(double min_turn_angle) const;

    int wrap(int i) const {
        int n = size();
        int m = i % n;
        return m < 0 ? m + n : m;
    }

  private:
    std::vector<Vec2> vertices_;
};

// Loads {"vertices": [[x,y],...], "closed": true} from a JSON document.
PolygonBoundary load_polygon_json(const std::string& path);
PolygonBoundary parse_polygon_json(const std::string& text);
void save_polygon_json(const PolygonBoundary& poly, const std::string& path);

// Subdivides segments so that no edge is longer than max_edge_len. Vertices
// are kept; new points are inserted by linear interpolation.
PolygonBoundary resample_polygon(const PolygonBoundary& poly, double max_edge_len);

// Regular sampling helpers used by tests and the experiment runner.
PolygonBoundary make_circle_polygon(Vec2 center, double radius, int n_vertices);
PolygonBoundary make_rectangle_polygon(Vec2 lo, Vec2 hi);

}  // namespace crossfield

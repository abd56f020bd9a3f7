#include "crossfield/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crossfield/errors.hpp"

namespace crossfield {

namespace {

// Proper segment intersection test (shared endpoints excluded by the caller).
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        double v = (q - p).cross(r - p);
        if (v > 0) return 1;
        if (v < 0) return -1;
        return 0;
    };
    int o1 = orient(a, b, c);
    int o2 = orient(a, b, d);
    int o3 = orient(c, d, a);
    int o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
               std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
    };
    if (o1 == 0 && on_segment(a, c, b)) return true;
    if (o2 == 0 && on_segment(a, d, b)) return true;
    if (o3 == 0 && on_segment(c, a, d)) return true;
    if (o4 == 0 && on_segment(c, b, d)) return true;
    return false;
}

double polygon_signed_area(const std::vector<Vec2>& v) {
    double a = 0.0;
    int n = int(v.size());
    for (int i = 0; i < n; ++i) {
        const Vec2& p = v[std::size_t(i)];
        const Vec2& q = v[std::size_t((i + 1) % n)];
        a += p.cross(q);
    }
    return 0.5 * a;
}

}  // namespace

PolygonBoundary::PolygonBoundary(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    int n = int(vertices_.size());
    if (n < 3) throw NonSimplePolygon("polygon needs at least 3 vertices");

    double scale = 0.0;
    for (const Vec2& v : vertices_) scale = std::max({scale, std::fabs(v.x), std::fabs(v.y)});
    double tol = 1e-12 * std::max(scale, 1.0);

    for (int i = 0; i < n; ++i) {
        Vec2 d = vertices_[std::size_t((i + 1) % n)] - vertices_[std::size_t(i)];
        if (d.norm() <= tol) {
            std::ostringstream os;
            os << "duplicate consecutive vertices at index " << i;
            throw NonSimplePolygon(os.str());
        }
    }

    // O(n^2) simplicity check; adjacent segments share an endpoint and are
    // skipped.
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(vertices_[std::size_t(i)], vertices_[std::size_t((i + 1) % n)],
                                   vertices_[std::size_t(j)],
                                   vertices_[std::size_t((j + 1) % n)])) {
                std::ostringstream os;
                os << "self-intersection between segments " << i << " and " << j;
                throw NonSimplePolygon(os.str());
            }
        }
    }

    if (polygon_signed_area(vertices_) < 0.0)
        std::reverse(vertices_.begin(), vertices_.end());
    if (!(polygon_signed_area(vertices_) > 0.0))
        throw NonSimplePolygon("polygon has zero area");
}

double PolygonBoundary::signed_area() const { return polygon_signed_area(vertices_); }

double PolygonBoundary::perimeter() const {
    double p = 0.0;
    for (int i = 0; i < size(); ++i) p += (segment_end(i) - segment_start(i)).norm();
    return p;
}

void PolygonBoundary::bounding_box(Vec2& lo, Vec2& hi) const {
    lo = hi = vertices_[0];
    for (const Vec2& v : vertices_) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
    }
}

double PolygonBoundary::turn_angle(int i) const {
    Vec2 din = (vertex(i) - vertex(i - 1)).normalized();
    Vec2 dout = (vertex(i + 1) - vertex(i)).normalized();
    return std::atan2(din.cross(dout), din.dot(dout));
}

std::vector<int> PolygonBoundary::corner_vertices(double min_turn_angle) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (std::fabs(turn_angle(i)) >= min_turn_angle) out.push_back(i);
    return out;
}

PolygonBoundary parse_polygon_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("polygon JSON parse failure: ") + e.what());
    }
    if (!doc.contains("vertices") || !doc["vertices"].is_array())
        throw IoError("polygon JSON: missing \"vertices\" array");
    std::vector<Vec2> verts;
    for (const auto& item : doc["vertices"]) {
        if (!item.is_array() || item.size() != 2)
            throw IoError("polygon JSON: each vertex must be [x, y]");
        verts.push_back({item[0].get<double>(), item[1].get<double>()});
    }
    return PolygonBoundary(std::move(verts));
}

PolygonBoundary load_polygon_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open polygon file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_polygon_json(buf.str());
}

void save_polygon_json(const PolygonBoundary& poly, const std::string& path) {
    nlohmann::json doc;
    doc["closed"] = true;
    auto& arr = doc["vertices"] = nlohmann::json::array();
    for (const Vec2& v : poly.vertices()) arr.push_back({v.x, v.y});
    std::ofstream out(path);
    if (!out) throw IoError("cannot write polygon file: " + path);
    out << doc.dump(2) << "\n";
}

PolygonBoundary resample_polygon(const PolygonBoundary& poly, double max_edge_len) {
    if (!(max_edge_len > 0.0)) throw InvalidArgument("resample_polygon: edge length must be > 0");
    std::vector<Vec2> out;
    for (int i = 0; i < poly.size(); ++i) {
        Vec2 a = poly.segment_start(i);
        Vec2 b = poly.segment_end(i);
        double len = (b - a).norm();
        int pieces = std::max(1, int(std::ceil(len / max_edge_len)));
        for (int k = 0; k < pieces; ++k) out.push_back(a + (b - a) * (double(k) / pieces));
    }
    return PolygonBoundary(std::move(out));
}

PolygonBoundary make_circle_polygon(Vec2 center, double radius, int n_vertices) {
    std::vector<Vec2> verts;
    verts.reserve(std::size_t(n_vertices));
    for (int k = 0; k < n_vertices; ++k) {
        double a = 2.0 * M_PI * k / n_vertices;
        verts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    }
    return PolygonBoundary(std::move(verts));
}

PolygonBoundary make_rectangle_polygon(Vec2 lo, Vec2 hi) {
    return PolygonBoundary({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}});
}

}  // namespace crossfield

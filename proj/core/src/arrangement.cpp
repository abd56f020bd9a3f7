#include "crossfield/arrangement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "crossfield/errors.hpp"
#include "crossfield/geometry.hpp"

namespace crossfield {

namespace {

double polyline_length(const std::vector<Vec2>& pts) {
    double len = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k) len += (pts[k] - pts[k - 1]).norm();
    return len;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double n2 = ab.norm2();
    if (n2 == 0.0) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / n2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

double point_polyline_distance(const Vec2& p, const std::vector<Vec2>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < pts.size(); ++k)
        best = std::min(best, point_segment_distance(p, pts[k - 1], pts[k]));
    return best;
}

double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    double d = 0.0;
    for (const Vec2& p : a) d = std::max(d, point_polyline_distance(p, b));
    for (const Vec2& p : b) d = std::max(d, point_polyline_distance(p, a));
    return d;
}

// Node registry with snap-merging; higher kind priority keeps its position.
struct NodeBuilder {
    std::vector<ArrNode> nodes;
    double snap_tol;

    static int priority(NodeKind k) {
        switch (k) {
            case NodeKind::singularity: return 3;
            case NodeKind::boundary_corner: return 2;
            case NodeKind::boundary_hit: return 1;
            case NodeKind::crossing: return 0;
        }
        return 0;
    }

    int add(const Vec2& p, NodeKind kind, int singularity = -1) {
        int best = -1;
        double best_d = snap_tol;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            double d = (nodes[k].position - p).norm();
            if (d <= best_d) {
                best_d = d;
                best = int(k);
            }
        }
        if (best >= 0) {
            if (priority(kind) > priority(nodes[std::size_t(best)].kind)) {
                nodes[std::size_t(best)].kind = kind;
                nodes[std::size_t(best)].position = p;
                if (singularity >= 0) nodes[std::size_t(best)].singularity = singularity;
            }
            return best;
        }
        nodes.push_back({p, kind, singularity});
        return int(nodes.size()) - 1;
    }
};

struct SplitEvent {
    double arc = 0.0;
    int node = -1;
    bool operator<(const SplitEvent& o) const { return arc < o.arc; }
};

// Cuts an open polyline at sorted arc positions; endpooints snapped onto the
// event nodes' coordinates.
std::vector<ArrEdge> split_polyline(const std::vector<Vec2>& pts,
                                    const std::vector<SplitEvent>& events,
                                    const std::vector<ArrNode>& nodes, bool on_boundary,
                                    double min_len) {
    std::vector<ArrEdge> out;
    if (events.size() < 2) return out;
    // Cumulative arc per point.
    std::vector<double> arc(pts.size(), 0.0);
    for (std::size_t k = 1; k < pts.size(); ++k)
        arc[k] = arc[k - 1] + (pts[k] - pts[k - 1]).norm();

    for (std::size_t e = 1; e < events.size(); ++e) {
        const SplitEvent& ea = events[e - 1];
        const SplitEvent& eb = events[e];
        if (eb.arc - ea.arc < min_len && ea.node == eb.node) continue;
        ArrEdge edge;
        edge.node_a = ea.node;
        edge.node_b = eb.node;
        edge.on_boundary = on_boundary;
        edge.polyline.push_back(nodes[std::size_t(ea.node)].position);
        for (std::size_t k = 0; k < pts.size(); ++k)
            if (arc[k] > ea.arc + 1e-12 && arc[k] < eb.arc - 1e-12)
                edge.polyline.push_back(pts[k]);
        edge.polyline.push_back(nodes[std::size_t(eb.node)].position);
        // Drop interior points that collide with the snapped endpoints.
        if (edge.polyline.size() > 2 &&
            (edge.polyline[1] - edge.polyline.front()).norm() < 1e-12)
            edge.polyline.erase(edge.polyline.begin() + 1);
        if (edge.polyline.size() > 2 &&
            (edge.polyline[edge.polyline.size() - 2] - edge.polyline.back()).norm() < 1e-12)
            edge.polyline.erase(edge.polyline.end() - 2);
        edge.length = polyline_length(edge.polyline);
        out.push_back(std::move(edge));
    }
    return out;
}

Vec2 departure_direction(const ArrEdge& e, bool forward) {
    const auto& p = e.polyline;
    if (forward) {
        for (std::size_t k = 1; k < p.size(); ++k) {
            Vec2 d = p[k] - p[0];
            if (d.norm() > 1e-12) return d.normalized();
        }
    } else {
        for (std::size_t k = p.size() - 1; k > 0; --k) {
            Vec2 d = p[k - 1] - p.back();
            if (d.norm() > 1e-12) return d.normalized();
        }
    }
    return {1.0, 0.0};
}

double polyline_shoelace(const std::vector<Vec2>& pts, bool forward) {
    // Directed shoelace contribution sum of x_i*y_{i+1} - x_{i+1}*y_i.
    double a = 0.0;
    if (forward) {
        for (std::size_t k = 1; k < pts.size(); ++k) a += pts[k - 1].cross(pts[k]);
    } else {
        for (std::size_t k = pts.size(); k > 1; --k) a += pts[k - 1].cross(pts[k - 2]);
    }
    return a;
}

}  // namespace

std::vector<int> Arrangement::interior_faces() const {
    std::vector<int> out;
    for (std::size_t f = 0; f < faces.size(); ++f)
        if (!faces[f].outer && faces[f].signed_area > 0.0) out.push_back(int(f));
    return out;
}

Arrangement build_arrangement(const std::vector<Streamline>& streamlines,
                              const PolygonBoundary& polygon,
                              const std::vector<Singularity>& singularities, double snap_tol,
                              double corner_min_turn) {
    if (!(snap_tol > 0.0)) throw InvalidArgument("build_arrangement: snap_tol must be > 0");

    // Valid separatrices end on the boundary or at a singularity.
    std::vector<const Streamline*> kept;
    for (const Streamline& s : streamlines) {
        if (s.points.size() < 2) continue;
        if (s.stop != TraceStop::boundary && s.stop != TraceStop::singularity) continue;
        if (polyline_length(s.points) <= snap_tol) continue;
        kept.push_back(&s);
    }

    // Duplicate separatrices (a pair traced from both ends) collapse to one.
    std::vector<const Streamline*> unique_lines;
    for (const Streamline* s : kept) {
        bool dup = false;
        for (const Streamline* t : unique_lines) {
            Vec2 sa = s->points.front(), sb = s->points.back();
            Vec2 ta = t->points.front(), tb = t->points.back();
            bool ends_match = ((sa - ta).norm() < snap_tol && (sb - tb).norm() < snap_tol) ||
                              ((sa - tb).norm() < snap_tol && (sb - ta).norm() < snap_tol);
            if (ends_match && hausdorff_distance(s->points, t->points) < snap_tol) {
                dup = true;
                break;
            }
        }
        if (!dup) unique_lines.push_back(s);
    }

    NodeBuilder nb;
    nb.snap_tol = snap_tol;
    for (std::size_t m = 0; m < singularities.size(); ++m)
        nb.add(singularities[m].position, NodeKind::singularity, int(m));
    for (int v : polygon.corner_vertices(corner_min_turn))
        nb.add(polygon.vertex(v), NodeKind::boundary_corner);

    // Streamline endpoints.
    std::vector<int> start_node(unique_lines.size()), end_node(unique_lines.size());
    for (std::size_t s = 0; s < unique_lines.size(); ++s) {
        const Streamline& line = *unique_lines[s];
        NodeKind end_kind = line.stop == TraceStop::boundary ? NodeKind::boundary_hit
                                                             : NodeKind::singularity;
        start_node[s] = nb.add(line.points.front(), NodeKind::singularity,
                               unique_lines[s]->seed_singularity);
        end_node[s] = nb.add(line.points.back(), end_kind, line.terminal_singularity);
    }

    // Pairwise interior crossings (bbox-pruned segment sweep). Crossings in
    // the snap neighborhood of an endpoint are absorbed by that node.
    std::vector<std::vector<SplitEvent>> events(unique_lines.size());
    auto arc_of = [](const std::vector<Vec2>& pts, std::size_t seg, double t) {
        double a = 0.0;
        for (std::size_t k = 1; k <= seg; ++k) a += (pts[k] - pts[k - 1]).norm();
        return a + (pts[seg + 1] - pts[seg]).norm() * t;
    };
    for (std::size_t s = 0; s < unique_lines.size(); ++s) {
        const auto& sp = unique_lines[s]->points;
        events[s].push_back({0.0, start_node[s]});
        events[s].push_back({polyline_length(sp), end_node[s]});
    }
    for (std::size_t s = 0; s < unique_lines.size(); ++s) {
        const auto& sp = unique_lines[s]->points;
        for (std::size_t t = s + 1; t < unique_lines.size(); ++t) {
            const auto& tp = unique_lines[t]->points;
            for (std::size_t i = 0; i + 1 < sp.size(); ++i) {
                Vec2 a = sp[i], b = sp[i + 1];
                for (std::size_t j = 0; j + 1 < tp.size(); ++j) {
                    Vec2 c = tp[j], d = tp[j + 1];
                    Vec2 r = b - a, q = d - c;
                    double den = r.cross(q);
                    if (den == 0.0) continue;
                    double ti = (c - a).cross(q) / den;
                    double tj = (c - a).cross(r) / den;
                    if (ti < 0.0 || ti > 1.0 || tj < 0.0 || tj > 1.0) continue;
                    Vec2 x = a + r * ti;
                    // Endpoint-adjacent hits are the shared nodes themselves.
                    if ((x - sp.front()).norm() < 2.0 * snap_tol ||
                        (x - sp.back()).norm() < 2.0 * snap_tol ||
                        (x - tp.front()).norm() < 2.0 * snap_tol ||
                        (x - tp.back()).norm() < 2.0 * snap_tol)
                        continue;
                    int node = nb.add(x, NodeKind::crossing);
                    events[s].push_back({arc_of(sp, i, ti), node});
                    events[t].push_back({arc_of(tp, j, tj), node});
                }
            }
        }
    }

    Arrangement arr;
    // Edges from streamlines.
    std::vector<ArrEdge> all_edges;
    for (std::size_t s = 0; s < unique_lines.size(); ++s) {
        std::sort(events[s].begin(), events[s].end());
        auto chains =
            split_polyline(unique_lines[s]->points, events[s], nb.nodes, false, 0.5 * snap_tol);
        for (auto& c : chains) all_edges.push_back(std::move(c));
    }

    // Boundary loop: events at corners and separatrix hits, by arc position.
    {
        std::vector<Vec2> loop = polygon.vertices();
        loop.push_back(loop.front());
        std::vector<double> arc(loop.size(), 0.0);
        for (std::size_t k = 1; k < loop.size(); ++k)
            arc[k] = arc[k - 1] + (loop[k] - loop[k - 1]).norm();

        std::vector<SplitEvent> bev;
        for (std::size_t nidx = 0; nidx < nb.nodes.size(); ++nidx) {
            const ArrNode& node = nb.nodes[nidx];
            if (node.kind != NodeKind::boundary_corner && node.kind != NodeKind::boundary_hit)
                continue;
            ClosestPoint cp = closest_segment_projection(node.position, polygon);
            double s = arc[std::size_t(cp.segment)] +
                       (polygon.segment_end(cp.segment) - polygon.segment_start(cp.segment)).norm() *
                           cp.alpha;
            bev.push_back({s, int(nidx)});
        }
        if (bev.empty()) {
            // Smooth boundary with no separatrix hits: anchor one node so the
            // loop becomes a single self-edge.
            int anchor = nb.add(polygon.vertex(0), NodeKind::boundary_hit);
            bev.push_back({0.0, anchor});
        }
        std::sort(bev.begin(), bev.end());
        // Rotate the loop so it starts at the first event; the loop then
        // reads as an open polyline from that event back to itself.
        double s0 = bev.front().arc;
        double total = arc.back();
        auto point_at = [&](double s) {
            auto it = std::upper_bound(arc.begin(), arc.end(), s);
            std::size_t k = std::min(std::size_t(it - arc.begin()), loop.size() - 1);
            double seg = arc[k] - arc[k - 1];
            double f = seg > 0.0 ? (s - arc[k - 1]) / seg : 0.0;
            return loop[k - 1] + (loop[k] - loop[k - 1]) * f;
        };
        std::vector<Vec2> rotated;
        {
            std::vector<std::pair<double, Vec2>> verts;
            for (std::size_t k = 0; k + 1 < loop.size(); ++k) {
                double shifted = arc[k] - s0;
                if (shifted <= 1e-15) shifted += total;
                if (shifted < total - 1e-15) verts.push_back({shifted, loop[k]});
            }
            std::sort(verts.begin(), verts.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            rotated.push_back(point_at(s0));
            for (const auto& [s, p] : verts) rotated.push_back(p);
            rotated.push_back(point_at(s0));
        }

        std::vector<SplitEvent> rev;
        for (const SplitEvent& e : bev) {
            double shifted = e.arc - s0;
            if (shifted < 0.0) shifted += total;
            rev.push_back({shifted, e.node});
        }
        std::sort(rev.begin(), rev.end());
        rev.push_back({total, bev.front().node});

        auto chains = split_polyline(rotated, rev, nb.nodes, true, 0.5 * snap_tol);
        for (auto& c : chains) all_edges.push_back(std::move(c));
    }

    arr.nodes = nb.nodes;
    arr.edges = std::move(all_edges);

    // Half-edge face traversal: darts sorted CCW per node; successor of a
    // dart is the clockwise neighbor of its twin at the head node.
    struct Dart {
        int edge;
        bool forward;
        int from;
        int to;
        double angle;
        int face = -1;
    };
    std::vector<Dart> darts;
    for (std::size_t e = 0; e < arr.edges.size(); ++e) {
        const ArrEdge& edge = arr.edges[e];
        Vec2 df = departure_direction(edge, true);
        Vec2 db = departure_direction(edge, false);
        darts.push_back({int(e), true, edge.node_a, edge.node_b, df.angle(), -1});
        darts.push_back({int(e), false, edge.node_b, edge.node_a, db.angle(), -1});
    }
    std::vector<std::vector<int>> per_node(arr.nodes.size());
    for (std::size_t d = 0; d < darts.size(); ++d)
        per_node[std::size_t(darts[d].from)].push_back(int(d));
    for (std::size_t n = 0; n < per_node.size(); ++n) {
        auto& list = per_node[n];
        std::sort(list.begin(), list.end(),
                  [&](int a, int b) { return darts[std::size_t(a)].angle < darts[std::size_t(b)].angle; });
        for (std::size_t k = 1; k < list.size(); ++k) {
            if (std::fabs(darts[std::size_t(list[k])].angle -
                          darts[std::size_t(list[k - 1])].angle) < 1e-12) {
                std::ostringstream os;
                os << "node " << n << " has coincident dart directions";
                throw NonManifoldNode(os.str());
            }
        }
    }
    auto twin_of = [](int d) { return d ^ 1; };
    auto next_of = [&](int d) {
        int t = twin_of(d);
        const auto& list = per_node[std::size_t(darts[std::size_t(t)].from)];
        auto it = std::find(list.begin(), list.end(), t);
        std::size_t pos = std::size_t(it - list.begin());
        return list[(pos + list.size() - 1) % list.size()];
    };

    for (std::size_t d0 = 0; d0 < darts.size(); ++d0) {
        if (darts[d0].face >= 0) continue;
        int face_id = int(arr.faces.size());
        ArrFace face;
        int d = int(d0);
        double area2 = 0.0;
        int safety = 0;
        do {
            darts[std::size_t(d)].face = face_id;
            face.edges.push_back({darts[std::size_t(d)].edge, darts[std::size_t(d)].forward});
            area2 += polyline_shoelace(arr.edges[std::size_t(darts[std::size_t(d)].edge)].polyline,
                                       darts[std::size_t(d)].forward);
            d = next_of(d);
            if (++safety > int(darts.size()) + 4)
                throw EulerViolation("face traversal failed to close");
        } while (d != int(d0));
        face.signed_area = 0.5 * area2;
        arr.faces.push_back(std::move(face));
    }

    // The unbounded face is the unique most-negative cycle.
    int outer = -1;
    double min_area = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < arr.faces.size(); ++f) {
        if (arr.faces[f].signed_area < min_area) {
            min_area = arr.faces[f].signed_area;
            outer = int(f);
        }
    }
    if (outer >= 0) arr.faces[std::size_t(outer)].outer = true;

    if (arr.euler_characteristic() != 2) {
        std::ostringstream os;
        os << "V - E + F = " << arr.nodes.size() << " - " << arr.edges.size() << " + "
           << arr.faces.size() << " = " << arr.euler_characteristic() << " != 2";
        throw EulerViolation(os.str());
    }
    return arr;
}

}  // namespace crossfield

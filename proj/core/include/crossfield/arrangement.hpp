#pragma once

#include <vector>

#include "crossfield/polygon.hpp"
#include "crossfield/topology.hpp"

namespace crossfield {

// Planar arrangement of the domain boundary and the traced separatrices.
// Nodes are singularities, sharp boundary corners, separatrix-boundary and
// separatrix-separatrix intersections; edges are polyline chains between
// nodes; faces are the cycles of the induced planar subdivision (the
// unbounded face is kept and flagged).

enum class NodeKind { singularity, boundary_corner, boundary_hit, crossing };

struct ArrNode {
    Vec2 position;
    NodeKind kind = NodeKind::crossing;
    int singularity = -1;  // for kind == singularity
};

struct ArrEdge {
    int node_a = -1;
    int node_b = -1;
    std::vector<Vec2> polyline;  // runs node_a -> node_b, endpoints included
    bool on_boundary = false;
    double length = 0.0;
};

struct ArrFace {
    // CCW cycle of directed edges: (edge index, true when traversed a->b).
    std::vector<std::pair<int, bool>> edges;
    double signed_area = 0.0;
    bool outer = false;
};

struct Arrangement {
    std::vector<ArrNode> nodes;
    std::vector<ArrEdge> edges;
    std::vector<ArrFace> faces;

    int euler_characteristic() const {
        return int(nodes.size()) - int(edges.size()) + int(faces.size());
    }
    std::vector<int> interior_faces() const;
};

// Builds the arrangement: splits chains at pairwise intersections, merges
// nodes within snap_tol, drops duplicated separatrices (same endpoints,
// Hausdorff distance below snap_tol), and validates V - E + F = 2. Throws
// EulerViolation / NonManifoldNode on structural failure.
Arrangement build_arrangement(const std::vector<Streamline>& streamlines,
                              const PolygonBoundary& polygon,
                              const std::vector<Singularity>& singularities, double snap_tol,
                              double corner_min_turn = M_PI / 8.0);

}  // namespace crossfield

#pragma once

#include <array>
#include <string>
#include <vector>

#include "crossfield/arrangement.hpp"

namespace crossfield {

// A four-sided face of the arrangement. Sides run corner k -> corner k+1
// counterclockwise; opposite sides (0,2) and (1,3) carry equal sample counts.
struct Block {
    int face = -1;
    std::array<int, 4> corner_nodes{};
    // Resampled side polylines, oriented along the CCW cycle; sides 0 and 2
    // hold n+1 points, sides 1 and 3 hold m+1.
    std::array<std::vector<Vec2>, 4> sides;
    // Arrangement chains making up each side: (chain id, traversed forward).
    std::array<std::vector<std::pair<int, bool>>, 4> side_chains;
    int n = 0;  // cells along sides 0 and 2
    int m = 0;  // cells along sides 1 and 3
};

struct NonQuadFace {
    int face = -1;
    int corner_count = 0;
};

struct BlockExtraction {
    std::vector<Block> blocks;
    std::vector<NonQuadFace> rejected;
    // Arc-length resampled polyline per chain id, shared verbatim by the
    // blocks on both sides so the assembled mesh conforms.
    std::vector<std::vector<Vec2>> chain_samples;
};

// Traverses interior faces, identifies the 4 corners (singularity or boundary
// corner nodes, or chain meetings with turn angle in [pi/4, 3pi/4]), assigns
// per-chain sample counts from target_edge_len with opposite-side matching,
// and resamples every chain once by arc length.
BlockExtraction extract_blocks(const Arrangement& arr, double target_edge_len);

// Harmonic map of the logical unit square onto a block: two decoupled
// 5-point Laplace solves with the resampled sides as Dirichlet data. Returns
// the (n+1) x (m+1) physical grid, row-major with side 0 as row 0.
// Throws SolverDiverged when the linear solve fails its 1e-10 residual.
std::vector<Vec2> harmonic_map_block(const Block& block);

struct QuadMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 4>> quads;  // CCW vertex ids
    std::vector<int> vertex_block;          // provenance: first block using it
};

// Welds the per-block grids into one conforming mesh. Shared chain samples
// collapse to single vertices; throws NonConformingInterface when adjacent
// blocks disagree on a shared chain.
QuadMesh assemble_quad_mesh(const std::vector<Block>& blocks,
                            const std::vector<std::vector<Vec2>>& grids, double weld_tol);

struct QuadQuality {
    double scaled_jacobian = 0.0;  // min over the 4 corners
    double min_angle = 0.0;        // degrees
    double max_angle = 0.0;        // degrees
};

struct MeshQualityReport {
    std::vector<QuadQuality> per_quad;
    double min_scaled_jacobian = 0.0;
    double mean_scaled_jacobian = 0.0;
    double min_angle = 0.0;
    double max_angle = 0.0;
    int nonpositive_jacobians = 0;
    std::array<int, 10> jacobian_histogram{};  // [0,0.1), [0.1,0.2), ...

    std::string summary() const;
};

MeshQualityReport mesh_quality(const QuadMesh& mesh);

// Vertex valence histogram (number of incident mesh edges per vertex).
std::vector<int> vertex_valences(const QuadMesh& mesh);

}  // namespace crossfield

#include "crossfield/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "crossfield/errors.hpp"

namespace crossfield {

namespace {

std::vector<Vec2> resample_by_arc_length(const std::vector<Vec2>& pts, int intervals) {
    std::vector<double> arc(pts.size(), 0.0);
    for (std::size_t k = 1; k < pts.size(); ++k)
        arc[k] = arc[k - 1] + (pts[k] - pts[k - 1]).norm();
    double total = arc.back();
    std::vector<Vec2> out;
    out.reserve(std::size_t(intervals) + 1);
    out.push_back(pts.front());
    for (int k = 1; k < intervals; ++k) {
        double s = total * double(k) / intervals;
        auto it = std::upper_bound(arc.begin(), arc.end(), s);
        std::size_t idx = std::min(std::size_t(it - arc.begin()), pts.size() - 1);
        double seg = arc[idx] - arc[idx - 1];
        double f = seg > 0.0 ? (s - arc[idx - 1]) / seg : 0.0;
        out.push_back(pts[idx - 1] + (pts[idx] - pts[idx - 1]) * f);
    }
    out.push_back(pts.back());
    return out;
}

Vec2 arrival_direction(const ArrEdge& e, bool forward) {
    const auto& p = e.polyline;
    if (forward) {
        for (std::size_t k = p.size() - 1; k > 0; --k) {
            Vec2 d = p.back() - p[k - 1];
            if (d.norm() > 1e-12) return d.normalized();
        }
    } else {
        for (std::size_t k = 1; k < p.size(); ++k) {
            Vec2 d = p.front() - p[k];
            if (d.norm() > 1e-12) return d.normalized();
        }
    }
    return {1.0, 0.0};
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

}  // namespace

BlockExtraction extract_blocks(const Arrangement& arr, double target_edge_len) {
    if (!(target_edge_len > 0.0))
        throw InvalidArgument("extract_blocks: target edge length must be > 0");

    BlockExtraction out;
    out.chain_samples.resize(arr.edges.size());

    struct FaceQuad {
        int face;
        std::array<int, 4> corner_nodes;
        std::array<std::vector<std::pair<int, bool>>, 4> side_chains;
    };
    std::vector<FaceQuad> quads;

    for (int f : arr.interior_faces()) {
        const ArrFace& face = arr.faces[std::size_t(f)];
        int nc = int(face.edges.size());
        // Meeting angle between the incoming and outgoing chain at each cycle
        // node; corner when in [pi/4, 3pi/4] or at singularity/corner nodes.
        std::vector<int> corner_pos;
        for (int k = 0; k < nc; ++k) {
            auto [e_in, f_in] = face.edges[std::size_t((k + nc - 1) % nc)];
            auto [e_out, f_out] = face.edges[std::size_t(k)];
            const ArrEdge& ein = arr.edges[std::size_t(e_in)];
            const ArrEdge& eout = arr.edges[std::size_t(e_out)];
            int node = f_out ? eout.node_a : eout.node_b;
            NodeKind kind = arr.nodes[std::size_t(node)].kind;
            Vec2 back = arrival_direction(ein, f_in) * -1.0;
            Vec2 fwd = departure_direction(eout, f_out);
            double meet = std::acos(std::clamp(back.dot(fwd), -1.0, 1.0));
            bool is_corner = kind == NodeKind::singularity || kind == NodeKind::boundary_corner ||
                             (meet >= M_PI / 4.0 && meet <= 3.0 * M_PI / 4.0);
            if (is_corner) corner_pos.push_back(k);
        }
        if (int(corner_pos.size()) != 4) {
            out.rejected.push_back({f, int(corner_pos.size())});
            continue;
        }
        FaceQuad q;
        q.face = f;
        for (int s = 0; s < 4; ++s) {
            int k0 = corner_pos[std::size_t(s)];
            int k1 = corner_pos[std::size_t((s + 1) % 4)];
            auto [e0, fw0] = face.edges[std::size_t(k0)];
            const ArrEdge& edge0 = arr.edges[std::size_t(e0)];
            q.corner_nodes[std::size_t(s)] = fw0 ? edge0.node_a : edge0.node_b;
            for (int k = k0; k != k1; k = (k + 1) % nc)
                q.side_chains[std::size_t(s)].push_back(face.edges[std::size_t(k)]);
        }
        quads.push_back(std::move(q));
    }

    // Per-chain interval counts: nearest integer to length/target, minimum 2,
    // then opposite-side sums matched by bumping the longest chain. Counts
    // only grow, so the propagation terminates or trips the iteration cap.
    std::vector<int> count(arr.edges.size(), 0);
    for (const FaceQuad& q : quads)
        for (const auto& side : q.side_chains)
            for (auto [e, fwd] : side)
                count[std::size_t(e)] = std::max(
                    2, int(std::lround(arr.edges[std::size_t(e)].length / target_edge_len)));

    auto side_sum = [&](const std::vector<std::pair<int, bool>>& side) {
        int s = 0;
        for (auto [e, fwd] : side) s += count[std::size_t(e)];
        return s;
    };
    auto bump_side = [&](const std::vector<std::pair<int, bool>>& side, int deficit) {
        int longest = side.front().first;
        for (auto [e, fwd] : side)
            if (arr.edges[std::size_t(e)].length > arr.edges[std::size_t(longest)].length)
                longest = e;
        count[std::size_t(longest)] += deficit;
    };
    bool stable = false;
    for (int it = 0; it < 200 && !stable; ++it) {
        stable = true;
        for (const FaceQuad& q : quads) {
            for (int pair = 0; pair < 2; ++pair) {
                int a = side_sum(q.side_chains[std::size_t(pair)]);
                int b = side_sum(q.side_chains[std::size_t(pair + 2)]);
                if (a == b) continue;
                stable = false;
                if (a < b)
                    bump_side(q.side_chains[std::size_t(pair)], b - a);
                else
                    bump_side(q.side_chains[std::size_t(pair + 2)], a - b);
            }
        }
    }
    if (!stable)
        throw NonConformingInterface("opposite-side sample matching did not stabilize");

    for (std::size_t e = 0; e < arr.edges.size(); ++e)
        if (count[e] > 0)
            out.chain_samples[e] = resample_by_arc_length(arr.edges[e].polyline, count[e]);

    for (const FaceQuad& q : quads) {
        Block b;
        b.face = q.face;
        b.corner_nodes = q.corner_nodes;
        b.side_chains = q.side_chains;
        for (int s = 0; s < 4; ++s) {
            std::vector<Vec2>& side = b.sides[std::size_t(s)];
            for (auto [e, fwd] : q.side_chains[std::size_t(s)]) {
                std::vector<Vec2> samples = out.chain_samples[std::size_t(e)];
                if (!fwd) std::reverse(samples.begin(), samples.end());
                std::size_t start = side.empty() ? 0 : 1;
                side.insert(side.end(), samples.begin() + std::ptrdiff_t(start), samples.end());
            }
        }
        b.n = int(b.sides[0].size()) - 1;
        b.m = int(b.sides[1].size()) - 1;
        if (int(b.sides[2].size()) - 1 != b.n || int(b.sides[3].size()) - 1 != b.m)
            throw NonConformingInterface("side sample counts disagree after matching");
        out.blocks.push_back(std::move(b));
    }
    return out;
}

std::vector<Vec2> harmonic_map_block(const Block& block) {
    int n = block.n;
    int m = block.m;
    if (n < 1 || m < 1) throw InvalidArgument("harmonic_map_block: empty block");

    std::vector<Vec2> grid(std::size_t(n + 1) * std::size_t(m + 1));
    auto G = [&](int i, int j) -> Vec2& { return grid[std::size_t(j) * std::size_t(n + 1) + std::size_t(i)]; };

    for (int i = 0; i <= n; ++i) {
        G(i, 0) = block.sides[0][std::size_t(i)];
        G(i, m) = block.sides[2][std::size_t(n - i)];
    }
    for (int j = 0; j <= m; ++j) {
        G(n, j) = block.sides[1][std::size_t(j)];
        G(0, j) = block.sides[3][std::size_t(m - j)];
    }
    if (n == 1 || m == 1) return grid;  // no interior unknowns

    // Two decoupled 5-point Laplace systems on the logical unit square.
    int ni = n - 1, nj = m - 1;
    int unknowns = ni * nj;
    double wu = double(n) * double(n);   // 1/du^2
    double wv = double(m) * double(m);   // 1/dv^2
    double diag = 2.0 * (wu + wv);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(std::size_t(unknowns) * 5);
    Eigen::VectorXd bx = Eigen::VectorXd::Zero(unknowns);
    Eigen::VectorXd by = Eigen::VectorXd::Zero(unknowns);
    auto idx = [&](int i, int j) { return (j - 1) * ni + (i - 1); };
    for (int j = 1; j < m; ++j) {
        for (int i = 1; i < n; ++i) {
            int row = idx(i, j);
            trips.emplace_back(row, row, diag);
            auto neighbor = [&](int ii, int jj, double w) {
                if (ii == 0 || ii == n || jj == 0 || jj == m) {
                    bx[row] += w * G(ii, jj).x;
                    by[row] += w * G(ii, jj).y;
                } else {
                    trips.emplace_back(row, idx(ii, jj), -w);
                }
            };
            neighbor(i - 1, j, wu);
            neighbor(i + 1, j, wu);
            neighbor(i, j - 1, wv);
            neighbor(i, j + 1, wv);
        }
    }
    Eigen::SparseMatrix<double> A(unknowns, unknowns);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
        throw SolverDiverged("harmonic_map_block: factorization failed");
    Eigen::VectorXd x = solver.solve(bx);
    Eigen::VectorXd y = solver.solve(by);

    double rx = (A * x - bx).cwiseAbs().maxCoeff() / std::max(1.0, bx.cwiseAbs().maxCoeff());
    double ry = (A * y - by).cwiseAbs().maxCoeff() / std::max(1.0, by.cwiseAbs().maxCoeff());
    if (!(rx < 1e-10) || !(ry < 1e-10))
        throw SolverDiverged("harmonic_map_block: residual above 1e-10");

    for (int j = 1; j < m; ++j)
        for (int i = 1; i < n; ++i) G(i, j) = {x[idx(i, j)], y[idx(i, j)]};
    return grid;
}

QuadMesh assemble_quad_mesh(const std::vector<Block>& blocks,
                            const std::vector<std::vector<Vec2>>& grids, double weld_tol) {
    if (blocks.size() != grids.size())
        throw InvalidArgument("assemble_quad_mesh: one grid per block");
    if (!(weld_tol > 0.0)) throw InvalidArgument("assemble_quad_mesh: weld_tol must be > 0");

    QuadMesh mesh;
    std::map<std::pair<long long, long long>, int> lookup;
    auto vertex_id = [&](const Vec2& p, int block) {
        std::pair<long long, long long> key{llround(p.x / weld_tol), llround(p.y / weld_tol)};
        auto it = lookup.find(key);
        if (it != lookup.end()) return it->second;
        int id = int(mesh.vertices.size());
        mesh.vertices.push_back(p);
        mesh.vertex_block.push_back(block);
        lookup.emplace(key, id);
        return id;
    };

    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const Block& blk = blocks[b];
        const auto& grid = grids[b];
        int n = blk.n, m = blk.m;
        if (int(grid.size()) != (n + 1) * (m + 1))
            throw NonConformingInterface("assemble_quad_mesh: grid size mismatch");
        std::vector<int> ids(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) ids[k] = vertex_id(grid[k], int(b));
        auto at = [&](int i, int j) { return ids[std::size_t(j) * std::size_t(n + 1) + std::size_t(i)]; };
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i)
                mesh.quads.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
    }

    // Conformity: every mesh edge borders at most two quads.
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& q : mesh.quads) {
        for (int k = 0; k < 4; ++k) {
            int a = q[std::size_t(k)], b = q[std::size_t((k + 1) % 4)];
            if (a == b) throw NonConformingInterface("degenerate quad edge after welding");
            auto key = std::minmax(a, b);
            if (++edge_use[{key.first, key.second}] > 2)
                throw NonConformingInterface("mesh edge shared by more than two quads");
        }
    }
    return mesh;
}

MeshQualityReport mesh_quality(const QuadMesh& mesh) {
    MeshQualityReport rep;
    rep.min_scaled_jacobian = std::numeric_limits<double>::infinity();
    rep.min_angle = std::numeric_limits<double>::infinity();
    rep.max_angle = 0.0;
    double sum_sj = 0.0;
    for (const auto& q : mesh.quads) {
        QuadQuality qq;
        qq.scaled_jacobian = std::numeric_limits<double>::infinity();
        qq.min_angle = std::numeric_limits<double>::infinity();
        qq.max_angle = 0.0;
        for (int k = 0; k < 4; ++k) {
            Vec2 v = mesh.vertices[std::size_t(q[std::size_t(k)])];
            Vec2 nxt = mesh.vertices[std::size_t(q[std::size_t((k + 1) % 4)])];
            Vec2 prv = mesh.vertices[std::size_t(q[std::size_t((k + 3) % 4)])];
            Vec2 e1 = nxt - v;
            Vec2 e2 = prv - v;
            double denom = e1.norm() * e2.norm();
            double sj = denom > 0.0 ? e1.cross(e2) / denom : 0.0;
            qq.scaled_jacobian = std::min(qq.scaled_jacobian, sj);
            double ang = std::atan2(std::fabs(e1.cross(e2)), e1.dot(e2)) * 180.0 / M_PI;
            qq.min_angle = std::min(qq.min_angle, ang);
            qq.max_angle = std::max(qq.max_angle, ang);
        }
        if (qq.scaled_jacobian <= 0.0) ++rep.nonpositive_jacobians;
        int bin = std::clamp(int(qq.scaled_jacobian * 10.0), 0, 9);
        ++rep.jacobian_histogram[std::size_t(bin)];
        sum_sj += qq.scaled_jacobian;
        rep.min_scaled_jacobian = std::min(rep.min_scaled_jacobian, qq.scaled_jacobian);
        rep.min_angle = std::min(rep.min_angle, qq.min_angle);
        rep.max_angle = std::max(rep.max_angle, qq.max_angle);
        rep.per_quad.push_back(qq);
    }
    rep.mean_scaled_jacobian = mesh.quads.empty() ? 0.0 : sum_sj / double(mesh.quads.size());
    if (mesh.quads.empty()) {
        rep.min_scaled_jacobian = 0.0;
        rep.min_angle = 0.0;
    }
    return rep;
}

std::string MeshQualityReport::summary() const {
    std::ostringstream os;
    os << "quads=" << per_quad.size() << " min_sj=" << min_scaled_jacobian
       << " mean_sj=" << mean_scaled_jacobian << " min_angle=" << min_angle
       << " max_angle=" << max_angle << " nonpositive=" << nonpositive_jacobians;
    return os.str();
}

std::vector<int> vertex_valences(const QuadMesh& mesh) {
    std::map<std::pair<int, int>, bool> edges;
    for (const auto& q : mesh.quads) {
        for (int k = 0; k < 4; ++k) {
            auto key = std::minmax(q[std::size_t(k)], q[std::size_t((k + 1) % 4)]);
            edges[{key.first, key.second}] = true;
        }
    }
    std::vector<int> val(mesh.vertices.size(), 0);
    for (const auto& [e, _] : edges) {
        ++val[std::size_t(e.first)];
        ++val[std::size_t(e.second)];
    }
    return val;
}

}  // namespace crossfield

#include "crossfield/topology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "crossfield/errors.hpp"

namespace crossfield {

namespace {

// Principal-value angle difference between two nonzero vectors.
double pv_angle_diff(const Vec2& a, const Vec2& b) {
    return std::atan2(a.cross(b), a.dot(b));
}

struct BilinearCoeffs {
    // u(s,t) = a + b s + c t + d s t on the unit cell.
    double a, b, c, d;
    double eval(double s, double t) const { return a + b * s + c * t + d * s * t; }
    double ds(double t) const { return b + d * t; }
    double dt(double s) const { return c + d * s; }
};

BilinearCoeffs cell_coeffs(const VectorField2& u, int i, int j, bool second) {
    auto val = [&](int di, int dj) {
        return second ? u.y(i + di, j + dj) : u.x(i + di, j + dj);
    };
    double u00 = val(0, 0), u10 = val(1, 0), u01 = val(0, 1), u11 = val(1, 1);
    return {u00, u10 - u00, u01 - u00, u11 - u10 - u01 + u00};
}

// Dirichlet energy of the bilinear interpolant over one cell, 2x2 Gauss
// quadrature (exact for the quadratic integrand). Independent of h: the
// 1/h^2 gradient scale cancels the h^2 cell area.
double cell_energy(const VectorField2& u, int i, int j) {
    BilinearCoeffs c1 = cell_coeffs(u, i, j, false);
    BilinearCoeffs c2 = cell_coeffs(u, i, j, true);
    const double q = 0.5 / std::sqrt(3.0);
    const double pts[2] = {0.5 - q, 0.5 + q};
    double e = 0.0;
    for (double s : pts) {
        for (double t : pts) {
            double gx1 = c1.ds(t), gy1 = c1.dt(s);
            double gx2 = c2.ds(t), gy2 = c2.dt(s);
            e += gx1 * gx1 + gy1 * gy1 + gx2 * gx2 + gy2 * gy2;
        }
    }
    return 0.25 * e;
}

bool cell_interior(const ScalarField& mask, int i, int j) {
    return mask.at(i, j) > 0.5 && mask.at(i + 1, j) > 0.5 && mask.at(i, j + 1) > 0.5 &&
           mask.at(i + 1, j + 1) > 0.5;
}

double raw_winding(const VectorField2& u, const Cell& cell, int r) {
    // CCW square node loop around the cell: nodes (cell.i - r .. cell.i+1+r) x
    // (cell.j - r .. cell.j+1+r), boundary only.
    std::vector<Vec2> ring;
    int i0 = cell.i - r, i1 = cell.i + 1 + r;
    int j0 = cell.j - r, j1 = cell.j + 1 + r;
    for (int i = i0; i < i1; ++i) ring.push_back(u.at(i, j0));
    for (int j = j0; j < j1; ++j) ring.push_back(u.at(i1, j));
    for (int i = i1; i > i0; --i) ring.push_back(u.at(i, j1));
    for (int j = j1; j > j0; --j) ring.push_back(u.at(i0, j));
    double total = 0.0;
    for (std::size_t k = 0; k < ring.size(); ++k)
        total += pv_angle_diff(ring[k], ring[(k + 1) % ring.size()]);
    return total / (2.0 * M_PI);
}

}  // namespace

Vec2 sample_field(const VectorField2& u, const Vec2& p) {
    const PeriodicGrid& g = u.grid();
    double gx = g.to_grid_x(p.x);
    double gy = g.to_grid_y(p.y);
    int i0 = int(std::floor(gx));
    int j0 = int(std::floor(gy));
    double fx = gx - i0;
    double fy = gy - j0;
    Vec2 v00 = u.at(i0, j0), v10 = u.at(i0 + 1, j0);
    Vec2 v01 = u.at(i0, j0 + 1), v11 = u.at(i0 + 1, j0 + 1);
    return v00 * ((1 - fx) * (1 - fy)) + v10 * (fx * (1 - fy)) + v01 * ((1 - fx) * fy) +
           v11 * (fx * fy);
}

double d_cross(double theta1, double theta2) {
    // Fold into [-pi/4, pi/4]; equivalent to min_m |t1 - t2 - m pi/2|.
    return std::fabs(std::remainder(theta1 - theta2, M_PI / 2.0));
}

std::vector<Cell> detect_singular_cells(const VectorField2& u, const ScalarField& mask) {
    const PeriodicGrid& grid = u.grid();
    int n = grid.resolution();
    std::vector<double> energy(std::size_t(grid.node_count()), 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            energy[std::size_t(grid.index(i, j))] = cell_energy(u, i, j);

    std::vector<Cell> out;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (!cell_interior(mask, i, j)) continue;
            double e = energy[std::size_t(grid.index(i, j))];
            bool strict_max = true;
            for (int dj = -1; dj <= 1 && strict_max; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    if (!(e > energy[std::size_t(grid.index(i + di, j + dj))])) {
                        strict_max = false;
                        break;
                    }
                }
            if (!strict_max) continue;
            Cell cell{i, j};
            double w;
            try {
                w = winding_index(u, cell);
            } catch (const AmbiguousWinding&) {
                continue;  // under-resolved; not a usable detection
            }
            if (w != 0.0) out.push_back(cell);
        }
    }
    return out;
}

double winding_index(const VectorField2& u, const Cell& cell, int ring_cells) {
    double raw = raw_winding(u, cell, ring_cells);
    double w = std::round(raw);
    if (std::fabs(w - raw) > 0.2) {
        std::ostringstream os;
        os << "winding " << raw << " at cell (" << cell.i << "," << cell.j
           << ") is not near an integer";
        throw AmbiguousWinding(os.str());
    }
    return w / 4.0;
}

LocalizedZero localize_zero(const VectorField2& u, const Cell& cell) {
    BilinearCoeffs p = cell_coeffs(u, cell.i, cell.j, false);
    BilinearCoeffs q = cell_coeffs(u, cell.i, cell.j, true);

    // Eliminating s from p = 0 leaves a quadratic in t:
    //   (q.a + q.c t)(p.b + p.d t) - (p.a + p.c t)(q.b + q.d t) = 0.
    double A = q.c * p.d - p.c * q.d;
    double B = q.a * p.d - p.a * q.d + q.c * p.b - p.c * q.b;
    double C = q.a * p.b - p.a * q.b;

    const double tol = 1e-9;
    std::vector<double> roots;
    if (std::fabs(A) < 1e-14 * (std::fabs(B) + std::fabs(C) + 1e-300)) {
        if (B != 0.0) roots.push_back(-C / B);
    } else {
        double disc = B * B - 4.0 * A * C;
        if (disc >= 0.0) {
            double sd = std::sqrt(disc);
            // Numerically stable pair.
            double q0 = -0.5 * (B + (B >= 0 ? sd : -sd));
            roots.push_back(q0 / A);
            if (q0 != 0.0) roots.push_back(C / q0);
        }
    }

    const PeriodicGrid& grid = u.grid();
    Vec2 base = grid.node(cell.i, cell.j);
    double best_res = std::numeric_limits<double>::infinity();
    Vec2 best;
    bool found = false;
    for (double t : roots) {
        if (t < -tol || t > 1.0 + tol) continue;
        double den1 = p.ds(t);
        double den2 = q.ds(t);
        double s;
        if (std::fabs(den1) >= std::fabs(den2)) {
            if (den1 == 0.0) continue;
            s = -(p.a + p.c * t) / den1;
        } else {
            s = -(q.a + q.c * t) / den2;
        }
        if (s < -tol || s > 1.0 + tol) continue;
        s = std::clamp(s, 0.0, 1.0);
        double tc = std::clamp(t, 0.0, 1.0);
        double res = std::hypot(p.eval(s, tc), q.eval(s, tc));
        if (res < best_res) {
            best_res = res;
            best = {base.x + s * grid.spacing(), base.y + tc * grid.spacing()};
            found = true;
        }
    }
    if (!found) {
        return {{base.x + 0.5 * grid.spacing(), base.y + 0.5 * grid.spacing()}, false};
    }
    return {best, true};
}

std::vector<SeparatrixSeed> separatrix_seeds(const VectorField2& u, const Cell& cell,
                                             const Vec2& s0, int samples_per_edge) {
    const PeriodicGrid& grid = u.grid();
    double h = grid.spacing();
    Vec2 base = grid.node(cell.i, cell.j);
    Vec2 c00 = base;
    Vec2 c10 = {base.x + h, base.y};
    Vec2 c11 = {base.x + h, base.y + h};
    Vec2 c01 = {base.x, base.y + h};
    std::array<std::pair<Vec2, Vec2>, 4> edges{
        std::pair{c00, c10}, std::pair{c10, c11}, std::pair{c11, c01}, std::pair{c01, c00}};

    // Alignment function along the cell boundary: some branch of the cross is
    // radial from s0 exactly when sin(arg u - 4 psi) = 0 with
    // cos(arg u - 4 psi) > 0 (the cos < 0 zeros are anti-radial).
    auto angle_mismatch = [&](const Vec2& P) {
        Vec2 up = sample_field(u, P);
        double psi = (P - s0).angle();
        return std::atan2(up.y, up.x) - 4.0 * psi;
    };

    std::vector<SeparatrixSeed> seeds;
    const double refine_tol = 1e-3 * h;
    for (const auto& [ea, eb] : edges) {
        double prev_f = std::sin(angle_mismatch(ea));
        Vec2 prev_p = ea;
        for (int k = 1; k <= samples_per_edge; ++k) {
            double q = double(k) / samples_per_edge;
            Vec2 P = ea + (eb - ea) * q;
            double f = std::sin(angle_mismatch(P));
            if (prev_f == 0.0 || prev_f * f < 0.0) {
                // Bisection bracket [prev_p, P].
                Vec2 lo = prev_p, hi = P;
                double flo = prev_f;
                while ((hi - lo).norm() > refine_tol) {
                    Vec2 mid = (lo + hi) * 0.5;
                    double fm = std::sin(angle_mismatch(mid));
                    if (flo * fm <= 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                Vec2 root = (lo + hi) * 0.5;
                if (std::cos(angle_mismatch(root)) > 0.0) {
                    Vec2 dir = (root - s0).normalized();
                    bool dup = false;
                    for (const auto& s : seeds)
                        if ((s.point - root).norm() < 2.0 * refine_tol) dup = true;
                    if (!dup) seeds.push_back({root, dir});
                }
            }
            prev_f = f;
            prev_p = P;
        }
    }
    return seeds;
}

std::vector<Singularity> find_singularities(const VectorField2& u, const ScalarField& mask) {
    std::vector<Singularity> out;
    for (const Cell& cell : detect_singular_cells(u, mask)) {
        Singularity s;
        s.cell_i = cell.i;
        s.cell_j = cell.j;
        s.index = winding_index(u, cell);
        LocalizedZero z = localize_zero(u, cell);
        s.position = z.position;
        s.localized = z.interior_root;
        s.seeds = separatrix_seeds(u, cell, s.position);
        int expected = int(std::lround(4.0 - 4.0 * s.index));
        s.seed_count_mismatch = int(s.seeds.size()) != expected;
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

// First crossing of segment [a,b] with the polygon; returns parameter in
// [0,1] and the hit point.
bool first_boundary_crossing(const Vec2& a, const Vec2& b, const PolygonBoundary& poly,
                             double& t_hit, Vec2& hit) {
    Vec2 d = b - a;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < poly.size(); ++s) {
        Vec2 p = poly.segment_start(s);
        Vec2 r = poly.segment_end(s) - p;
        double den = d.cross(r);
        if (den == 0.0) continue;
        double t = (p - a).cross(r) / den;
        double w = (p - a).cross(d) / den;
        if (t >= 0.0 && t <= 1.0 && w >= 0.0 && w <= 1.0 && t < best) best = t;
    }
    if (!std::isfinite(best)) return false;
    t_hit = best;
    hit = a + d * best;
    return true;
}

bool point_inside(const Vec2& p, const PolygonBoundary& poly) {
    bool inside = false;
    for (int i = 0; i < poly.size(); ++i) {
        Vec2 a = poly.segment_start(i);
        Vec2 b = poly.segment_end(i);
        if ((a.y > p.y) != (b.y > p.y)) {
            double cx = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < cx) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

Streamline trace_streamline(const Vec2& seed_point, const Vec2& seed_direction,
                            const VectorField2& u, const std::vector<Singularity>& singularities,
                            const PolygonBoundary& polygon, const TraceOptions& opts) {
    const PeriodicGrid& grid = u.grid();
    double h = grid.spacing();
    double hs = opts.step_size > 0.0 ? opts.step_size : 0.5 * h;
    double stop_r = opts.stop_radius > 0.0 ? opts.stop_radius : 2.0 * h;
    double max_len = opts.max_length > 0.0 ? opts.max_length : 4.0 * grid.side_length();

    // Branch-folded direction: the cross branch nearest to the reference.
    auto branch_dir = [&](const Vec2& p, const Vec2& ref) {
        Vec2 up = sample_field(u, p);
        if (up.norm2() < 1e-24) return ref;
        double ref_angle = ref.angle();
        double beta = ref_angle + std::remainder(std::atan2(up.y, up.x) / 4.0 - ref_angle,
                                                 M_PI / 2.0);
        return Vec2{std::cos(beta), std::sin(beta)};
    };

    // The source singularity (if any) is ignored until the trace escapes it.
    int source = -1;
    for (std::size_t m = 0; m < singularities.size(); ++m)
        if ((singularities[m].position - seed_point).norm() < 1.5 * stop_r) source = int(m);
    bool escaped_source = source < 0;

    Streamline line;
    line.seed_singularity = source;
    line.points.push_back(seed_point);

    Vec2 p = seed_point;
    Vec2 dir = seed_direction.normalized();
    Vec2 window_start = p;
    int steps_in_window = 0;
    const int max_steps = int(std::ceil(max_len / hs)) + 8;

    for (int step_i = 0; step_i < max_steps; ++step_i) {
        Vec2 k1 = branch_dir(p, dir);
        Vec2 k2 = branch_dir(p + k1 * (0.5 * hs), k1);
        Vec2 k3 = branch_dir(p + k2 * (0.5 * hs), k2);
        Vec2 k4 = branch_dir(p + k3 * hs, k3);
        Vec2 disp = (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (hs / 6.0);
        Vec2 np = p + disp;

        // Boundary exit: clip to the exact intersection.
        double t_hit;
        Vec2 hit;
        if (first_boundary_crossing(p, np, polygon, t_hit, hit)) {
            line.points.push_back(hit);
            line.length += (hit - p).norm();
            line.stop = TraceStop::boundary;
            return line;
        }
        if (!point_inside(np, polygon)) {
            line.points.push_back(np);
            line.length += disp.norm();
            line.stop = TraceStop::left_domain;
            return line;
        }

        line.points.push_back(np);
        line.length += disp.norm();
        dir = disp.normalized();
        p = np;

        // Singularity stop (endpoint snapped for arrangement building).
        if (source >= 0 && !escaped_source &&
            (p - singularities[std::size_t(source)].position).norm() > 1.5 * stop_r)
            escaped_source = true;
        for (std::size_t m = 0; m < singularities.size(); ++m) {
            if (int(m) == source && !escaped_source) continue;
            if ((p - singularities[m].position).norm() < stop_r) {
                line.points.push_back(singularities[m].position);
                line.length += (singularities[m].position - p).norm();
                line.stop = TraceStop::singularity;
                line.terminal_singularity = int(m);
                return line;
            }
        }

        if (line.length > max_len) {
            line.stop = TraceStop::max_length;
            return line;
        }

        // Branch flapping makes the trace mill around in place.
        ++steps_in_window;
        if (steps_in_window >= 10) {
            if ((p - window_start).norm() < 0.01 * hs)
                throw StagnantTrace("streamline stagnated (branch flapping)");
            window_start = p;
            steps_in_window = 0;
        }
    }
    line.stop = TraceStop::max_length;
    return line;
}

std::vector<Streamline> trace_all_separatrices(const std::vector<Singularity>& singularities,
                                               const VectorField2& u,
                                               const PolygonBoundary& polygon,
                                               const TraceOptions& opts) {
    std::vector<Streamline> out;
    for (std::size_t m = 0; m < singularities.size(); ++m) {
        for (const SeparatrixSeed& seed : singularities[m].seeds) {
            try {
                Streamline line =
                    trace_streamline(seed.point, seed.direction, u, singularities, polygon, opts);
                line.seed_singularity = int(m);
                // Separatrices start at their singularity: prepend the exact
                // position so arrangement endpoints land on the node.
                line.points.insert(line.points.begin(), singularities[m].position);
                out.push_back(std::move(line));
            } catch (const StagnantTrace&) {
                Streamline bad;
                bad.seed_singularity = int(m);
                bad.points = {singularities[m].position, seed.point};
                bad.stop = TraceStop::stagnant;
                out.push_back(std::move(bad));
            }
        }
    }
    return out;
}

double loop_winding(const VectorField2& u, const std::vector<Vec2>& loop) {
    double total = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        Vec2 a = sample_field(u, loop[k]);
        Vec2 b = sample_field(u, loop[(k + 1) % loop.size()]);
        total += pv_angle_diff(a, b);
    }
    return total / (2.0 * M_PI);
}

std::vector<BoundaryDefect> boundary_defects(const VectorField2& u,
                                             const PolygonBoundary& polygon,
                                             double min_turn_angle, double loop_radius) {
    double rho = loop_radius > 0.0 ? loop_radius : 3.0 * u.grid().spacing();
    std::vector<BoundaryDefect> out;
    for (int v : polygon.corner_vertices(min_turn_angle)) {
        double beta = polygon.turn_angle(v);
        Vec2 d_out = (polygon.vertex(v + 1) - polygon.vertex(v)).normalized();
        double interior = M_PI - beta;

        // Interior arc from the outgoing edge around to the incoming edge,
        // trimmed a little off both boundary rays.
        double a0 = d_out.angle();
        double margin = std::min(0.1, 0.2 * interior);
        int samples = 64;
        double prev_arg = 0.0;
        double delta = 0.0;
        for (int k = 0; k <= samples; ++k) {
            double a = a0 + margin + (interior - 2.0 * margin) * double(k) / samples;
            Vec2 P = polygon.vertex(v) + Vec2{std::cos(a), std::sin(a)} * rho;
            Vec2 up = sample_field(u, P);
            double arg = std::atan2(up.y, up.x);
            if (k > 0) delta += std::remainder(arg - prev_arg, 2.0 * M_PI);
            prev_arg = arg;
        }
        // An aligned defect-free field rotates by -4*beta along this arc;
        // report the deviation as a quarter-index.
        BoundaryDefect d;
        d.position = polygon.vertex(v);
        d.vertex = v;
        d.interior_angle = interior;
        d.half_loop_index = (delta + 4.0 * beta) / (8.0 * M_PI);
        out.push_back(d);
    }
    return out;
}

}  // namespace crossfield

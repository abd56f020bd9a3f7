#include "crossfield/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "crossfield/errors.hpp"
#include "crossfield/geometry.hpp"
#include "crossfield/io.hpp"
#include "crossfield/topology.hpp"

namespace crossfield {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

Vec2 polygon_centroid(const PolygonBoundary& poly) {
    double a = 0.0;
    Vec2 c{0.0, 0.0};
    for (int i = 0; i < poly.size(); ++i) {
        Vec2 p = poly.segment_start(i);
        Vec2 q = poly.segment_end(i);
        double w = p.cross(q);
        a += w;
        c += (p + q) * w;
    }
    a *= 0.5;
    return c / (6.0 * a);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config line " << lineno << " is not key = value";
            throw IoError(os.str());
        }
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        try {
            if (key == "polygon") cfg.polygon_path = val;
            else if (key == "n") cfg.grid_n = std::stoi(val);
            else if (key == "l") cfg.grid_l = std::stod(val);
            else if (key == "alpha") cfg.alpha = std::stod(val);
            else if (key == "eps") cfg.eps = std::stod(val);
            else if (key == "tau") cfg.tau = std::stod(val);
            else if (key == "band") cfg.band = std::stod(val);
            else if (key == "sigma") cfg.sigma = std::stod(val);
            else if (key == "forcing_scale") cfg.forcing_scale = std::stod(val);
            else if (key == "tol") cfg.tol = std::stod(val);
            else if (key == "max_iter") cfg.max_iter = std::stoi(val);
            else if (key == "norm_floor") cfg.norm_floor = std::stod(val);
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "energy_stride") cfg.energy_stride = std::stoi(val);
            else if (key == "resample_edge_fraction") cfg.resample_edge_fraction = std::stod(val);
            else if (key == "target_edge_len") cfg.target_edge_len = std::stod(val);
            else if (key == "sweep_alphas") cfg.sweep_alphas = parse_double_list(val);
            else if (key == "sweep_workers") cfg.sweep_workers = std::stoi(val);
            else if (key == "out_dir") cfg.out_dir = val;
            else if (key == "run_name") cfg.run_name = val;
            else if (key == "write_svg") cfg.write_svg = (val == "1" || val == "true");
            else if (key == "anomalous_radius") cfg.anomalous_radius = std::stod(val);
            else throw IoError("unknown config key: " + key);
        } catch (const std::invalid_argument&) {
            throw IoError("bad value for config key " + key + ": " + val);
        } catch (const std::out_of_range&) {
            throw IoError("bad value for config key " + key + ": " + val);
        }
    }
    return cfg;
}

void write_resolved_config(const RunConfig& cfg, const std::string& path) {
    PeriodicGrid grid(cfg.grid_n, cfg.grid_l);
    double h = grid.spacing();
    double eps = cfg.resolved_eps(h);
    double tau = cfg.resolved_tau(h);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write resolved config: " + path);
    out << "polygon = " << cfg.polygon_path << "\n";
    out << "n = " << cfg.grid_n << "\n";
    out << "l = " << format_g17(cfg.grid_l) << "\n";
    out << "alpha = " << format_g17(cfg.alpha) << "\n";
    out << "eps = " << format_g17(eps) << "\n";
    out << "tau = " << format_g17(tau) << "\n";
    out << "band = " << format_g17(cfg.resolved_band(h, eps)) << "\n";
    out << "sigma = " << format_g17(cfg.resolved_sigma(h, eps)) << "\n";
    out << "forcing_scale = " << format_g17(cfg.resolved_forcing_scale(tau)) << "\n";
    out << "tol = " << format_g17(cfg.tol) << "\n";
    out << "max_iter = " << cfg.max_iter << "\n";
    out << "norm_floor = " << format_g17(cfg.norm_floor) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "energy_stride = " << cfg.energy_stride << "\n";
    out << "resample_edge_fraction = " << format_g17(cfg.resample_edge_fraction) << "\n";
    out << "target_edge_len = " << format_g17(cfg.target_edge_len) << "\n";
    if (!cfg.sweep_alphas.empty()) {
        out << "sweep_alphas = ";
        for (std::size_t k = 0; k < cfg.sweep_alphas.size(); ++k)
            out << (k ? "," : "") << format_g17(cfg.sweep_alphas[k]);
        out << "\n";
        out << "sweep_workers = " << cfg.sweep_workers << "\n";
    }
    out << "anomalous_radius = " << format_g17(cfg.anomalous_radius) << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    out << "run_name = " << cfg.run_name << "\n";
    out << "write_svg = " << (cfg.write_svg ? 1 : 0) << "\n";
}

FieldArtifacts run_field(const RunConfig& cfg) {
    PeriodicGrid grid(cfg.grid_n, cfg.grid_l);
    double h = grid.spacing();
    double eps = cfg.resolved_eps(h);
    double tau = cfg.resolved_tau(h);
    double band = cfg.resolved_band(h, eps);
    double sigma = cfg.resolved_sigma(h, eps);

    PolygonBoundary poly = load_polygon_json(cfg.polygon_path);
    double max_edge = h * cfg.resample_edge_fraction;
    PolygonBoundary fine = resample_polygon(poly, max_edge);

    SpectralPlan plan(grid);
    ScalarField chi = rasterize_indicator(fine, grid);
    ScalarField phi = phase_field(plan, chi, eps);
    ScalarField B = boundary_weight(phi);
    ScalarField mask = interior_mask(phi);
    std::vector<Vec2> data = boundary_cross_data(fine);
    VectorField2 g = extend_boundary_data(plan, fine, data, band, sigma);
    VectorField2 u0 = initial_field(g, cfg.norm_floor, cfg.seed);
    double fscale = cfg.resolved_forcing_scale(tau);
    if (fscale != 1.0) {
        for (double& v : g.comp1()) v *= fscale;
        for (double& v : g.comp2()) v *= fscale;
    }

    SolverConfig sc;
    sc.tau = tau;
    sc.eps = eps;
    sc.tol = cfg.tol;
    sc.max_iter = cfg.max_iter;
    sc.norm_floor = cfg.norm_floor;
    sc.seed = cfg.seed;
    sc.energy_stride = cfg.energy_stride;
    SolveResult sol = solve(plan, u0, g, B, mask, sc);

    std::filesystem::create_directories(cfg.out_dir);
    FieldArtifacts art{std::move(sol.u), std::move(phi), std::move(mask), std::move(sol.trace),
                       std::move(fine),  "",             ""};
    art.field_path = join_path(cfg.out_dir, cfg.run_name + "_field.bin");
    art.trace_path = join_path(cfg.out_dir, cfg.run_name + "_trace.csv");
    write_field_binary(art.u, art.field_path);
    write_trace_csv(art.trace, art.trace_path);
    write_resolved_config(cfg, join_path(cfg.out_dir, cfg.run_name + "_resolved.cfg"));
    if (cfg.write_svg)
        write_field_svg(art.u, art.mask, art.polygon,
                        join_path(cfg.out_dir, cfg.run_name + "_field.svg"));
    return art;
}

MeshArtifacts run_mesh(const RunConfig& cfg, const FieldArtifacts& field) {
    const PeriodicGrid& grid = field.u.grid();
    double h = grid.spacing();
    double target = cfg.target_edge_len > 0.0 ? cfg.target_edge_len : 4.0 * h;

    MeshArtifacts art;
    art.singularities = find_singularities(field.u, field.mask);
    art.defects = boundary_defects(field.u, field.polygon);

    std::vector<Streamline> lines =
        trace_all_separatrices(art.singularities, field.u, field.polygon);
    Arrangement arr = build_arrangement(lines, field.polygon, art.singularities, 2.0 * h);
    art.arrangement_euler = arr.euler_characteristic();

    BlockExtraction ext = extract_blocks(arr, target);
    art.block_count = int(ext.blocks.size());
    art.rejected_faces = ext.rejected;

    std::vector<std::vector<Vec2>> grids;
    grids.reserve(ext.blocks.size());
    for (const Block& b : ext.blocks) grids.push_back(harmonic_map_block(b));
    art.mesh = assemble_quad_mesh(ext.blocks, grids, 1e-9 * grid.side_length());
    art.quality = mesh_quality(art.mesh);

    std::filesystem::create_directories(cfg.out_dir);
    auto path = [&](const std::string& suffix) {
        return join_path(cfg.out_dir, cfg.run_name + suffix);
    };
    write_singularities_json(art.singularities, art.defects, path("_singularities.json"));
    write_streamlines_csv(lines, path("_streamlines.csv"));
    write_obj(art.mesh, path("_mesh.obj"));
    write_vtk(art.mesh, path("_mesh.vtk"));
    if (cfg.write_svg) write_layout_svg(field.polygon, lines, art.singularities,
                                        path("_layout.svg"), &art.mesh);

    // Block report: per-block corner nodes and resolutions plus rejects.
    std::ofstream rep(path("_blocks.txt"));
    if (!rep) throw IoError("cannot write block report");
    rep << "blocks " << ext.blocks.size() << "\n";
    for (std::size_t b = 0; b < ext.blocks.size(); ++b) {
        const Block& blk = ext.blocks[b];
        rep << "block " << b << " face " << blk.face << " n " << blk.n << " m " << blk.m
            << " corners";
        for (int c : blk.corner_nodes) rep << ' ' << c;
        rep << "\n";
    }
    for (const NonQuadFace& r : ext.rejected)
        rep << "non_quad_face " << r.face << " corners " << r.corner_count << "\n";
    rep << "quality " << art.quality.summary() << "\n";
    return art;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
    if (cfg.sweep_alphas.empty()) throw InvalidArgument("run_sweep: alpha list is empty");
    std::vector<double> alphas = cfg.sweep_alphas;
    std::sort(alphas.begin(), alphas.end(), std::greater<double>());

    std::vector<SweepRow> rows(alphas.size());
    std::atomic<std::size_t> cursor{0};
    int workers = std::max(1, std::min(cfg.sweep_workers, int(alphas.size())));

    auto worker = [&]() {
        for (;;) {
            std::size_t k = cursor.fetch_add(1);
            if (k >= alphas.size()) return;
            SweepRow& row = rows[k];
            row.alpha = alphas[k];
            try {
                RunConfig sub = cfg;
                sub.alpha = alphas[k];
                sub.eps.reset();
                sub.tau.reset();
                char tag[48];
                std::snprintf(tag, sizeof tag, "_alpha%g", alphas[k]);
                sub.run_name = cfg.run_name + tag;
                sub.write_svg = false;
                FieldArtifacts art = run_field(sub);
                row.iterations = art.trace.iterations;
                row.converged = art.trace.converged;
                row.final_energy = art.trace.records.back().energy_modified;
                row.final_dirichlet = art.trace.records.back().energy_dirichlet_inner;
                std::vector<Singularity> sings = find_singularities(art.u, art.mask);
                row.singularity_count = int(sings.size());
                if (!sings.empty()) {
                    Vec2 c = polygon_centroid(art.polygon);
                    double sum = 0.0;
                    for (const Singularity& s : sings) sum += (s.position - c).norm();
                    row.mean_radius = sum / double(sings.size());
                }
                row.anomalous = !sings.empty() && row.mean_radius < cfg.anomalous_radius;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::filesystem::create_directories(cfg.out_dir);
    write_sweep_csv(rows, join_path(cfg.out_dir, cfg.run_name + "_sweep.csv"));
    {
        std::ofstream r(join_path(cfg.out_dir, cfg.run_name + "_radius_vs_alpha.csv"));
        r << "alpha,mean_radius\n";
        for (const SweepRow& row : rows)
            r << format_g17(row.alpha) << ',' << format_g17(row.mean_radius) << '\n';
        std::ofstream e(join_path(cfg.out_dir, cfg.run_name + "_energy_vs_alpha.csv"));
        e << "alpha,E_modified,E_dirichlet_inner\n";
        for (const SweepRow& row : rows)
            e << format_g17(row.alpha) << ',' << format_g17(row.final_energy) << ','
              << format_g17(row.final_dirichlet) << '\n';
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write sweep CSV: " + path);
    out << "alpha,iterations,converged,E_modified,E_dirichlet_inner,singularities,mean_radius,"
           "anomalous,error\n";
    for (const SweepRow& r : rows) {
        out << format_g17(r.alpha) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
            << format_g17(r.final_energy) << ',' << format_g17(r.final_dirichlet) << ','
            << r.singularity_count << ',' << format_g17(r.mean_radius) << ','
            << (r.anomalous ? 1 : 0) << ',' << r.error << '\n';
    }
}

}  // namespace crossfield

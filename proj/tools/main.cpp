// Command-line front end: field / mesh / sweep / validate subcommands wiring
// the cross-field pipeline end to end.
//
// Exit codes: 0 success, 1 numerical or pipeline failure, 2 usage/input error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "crossfield/errors.hpp"
#include "crossfield/geometry.hpp"
#include "crossfield/io.hpp"
#include "crossfield/pipeline.hpp"
#include "crossfield/validation.hpp"

namespace cf = crossfield;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;

struct CliOverrides {
    std::optional<std::string> config_path;
    std::optional<std::string> polygon;
    std::optional<int> n;
    std::optional<double> l;
    std::optional<double> alpha;
    std::optional<double> eps;
    std::optional<double> tau;
    std::optional<double> band;
    std::optional<double> sigma;
    std::optional<double> forcing_scale;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<std::uint64_t> seed;
    std::optional<double> target_edge_len;
    std::optional<std::vector<double>> alphas;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
    std::optional<std::string> run_name;
    bool no_svg = false;
};

void add_common_options(CLI::App* cmd, CliOverrides& ov) {
    cmd->add_option("-c,--config", ov.config_path, "flat key = value config file");
    cmd->add_option("-p,--polygon", ov.polygon, "polygon JSON path");
    cmd->add_option("-n,--grid-n", ov.n, "grid resolution (even, >= 16)");
    cmd->add_option("-L,--grid-l", ov.l, "computational box side length");
    cmd->add_option("-a,--alpha", ov.alpha, "eps = tau = alpha * h");
    cmd->add_option("--eps", ov.eps, "diffuse-interface width (overrides alpha)");
    cmd->add_option("--tau", ov.tau, "diffusion time (overrides alpha)");
    cmd->add_option("--band", ov.band, "boundary data band half-width");
    cmd->add_option("--sigma", ov.sigma, "boundary data mollifier width");
    cmd->add_option("--forcing-scale", ov.forcing_scale,
                    "boundary penalty scale (0 = auto: 2/tau)");
    cmd->add_option("--tol", ov.tol, "RMS update stopping threshold");
    cmd->add_option("--max-iter", ov.max_iter, "iteration cap");
    cmd->add_option("--seed", ov.seed, "initialization seed");
    cmd->add_option("--target-edge-len", ov.target_edge_len, "mesh target edge length");
    cmd->add_option("-o,--out-dir", ov.out_dir, "output directory");
    cmd->add_option("--name", ov.run_name, "artifact name prefix");
    cmd->add_flag("--no-svg", ov.no_svg, "skip SVG artifacts");
}

cf::RunConfig resolve_config(const CliOverrides& ov) {
    cf::RunConfig cfg;
    if (ov.config_path) cfg = cf::load_run_config(*ov.config_path);
    if (ov.polygon) cfg.polygon_path = *ov.polygon;
    if (ov.n) cfg.grid_n = *ov.n;
    if (ov.l) cfg.grid_l = *ov.l;
    if (ov.alpha) cfg.alpha = *ov.alpha;
    if (ov.eps) cfg.eps = *ov.eps;
    if (ov.tau) cfg.tau = *ov.tau;
    if (ov.band) cfg.band = *ov.band;
    if (ov.sigma) cfg.sigma = *ov.sigma;
    if (ov.forcing_scale) cfg.forcing_scale = *ov.forcing_scale;
    if (ov.tol) cfg.tol = *ov.tol;
    if (ov.max_iter) cfg.max_iter = *ov.max_iter;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.target_edge_len) cfg.target_edge_len = *ov.target_edge_len;
    if (ov.alphas) cfg.sweep_alphas = *ov.alphas;
    if (ov.workers) cfg.sweep_workers = *ov.workers;
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.run_name) cfg.run_name = *ov.run_name;
    if (ov.no_svg) cfg.write_svg = false;
    if (cfg.polygon_path.empty())
        throw cf::IoError("no polygon specified (use --polygon or a config file)");
    return cfg;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const cf::IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cf::InvalidArgument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cf::NonSimplePolygon& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cf::PolygonOutOfBounds& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cf::Error& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return kExitPipeline;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPipeline;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary-aligned cross fields and block-structured quad meshes"};
    app.require_subcommand(1);

    CliOverrides ov_field, ov_mesh, ov_sweep;

    CLI::App* cmd_field = app.add_subcommand(
        "field", "compute the converged representation field and energy trace");
    add_common_options(cmd_field, ov_field);

    CLI::App* cmd_mesh = app.add_subcommand(
        "mesh", "full pipeline: field, singularities, separatrices, blocks, quad mesh");
    add_common_options(cmd_mesh, ov_mesh);
    std::string mesh_field_path;
    cmd_mesh->add_option("--field", mesh_field_path,
                         "reuse a previously computed field dump instead of solving");

    CLI::App* cmd_sweep =
        app.add_subcommand("sweep", "run the solver across a list of alphas");
    add_common_options(cmd_sweep, ov_sweep);
    std::vector<double> sweep_list;
    cmd_sweep->add_option("--alphas", sweep_list, "alpha values (descending)")->delimiter(',');
    int sweep_workers = 0;
    cmd_sweep->add_option("--workers", sweep_workers, "worker pool size");

    CLI::App* cmd_validate =
        app.add_subcommand("validate", "run the oracle property suites and emit a report");
    int validate_trials = 100;
    std::uint64_t validate_seed = 7;
    std::string validate_out = "oracle_reports.jsonl";
    cmd_validate->add_option("--trials", validate_trials, "trials per property");
    cmd_validate->add_option("--seed", validate_seed, "base seed");
    cmd_validate->add_option("--out", validate_out, "JSONL report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (cmd_field->parsed()) {
        return run_guarded([&] {
            cf::RunConfig cfg = resolve_config(ov_field);
            cf::FieldArtifacts art = cf::run_field(cfg);
            std::printf("iterations %d converged %d final_E %.17g\n", art.trace.iterations,
                        art.trace.converged ? 1 : 0,
                        art.trace.records.back().energy_modified);
            std::printf("field %s\ntrace %s\n", art.field_path.c_str(), art.trace_path.c_str());
            return kExitOk;
        });
    }

    if (cmd_mesh->parsed()) {
        return run_guarded([&] {
            cf::RunConfig cfg = resolve_config(ov_mesh);
            cf::FieldArtifacts art = [&] {
                if (mesh_field_path.empty()) return cf::run_field(cfg);
                // Rebuild the geometry around a previously dumped field.
                cf::VectorField2 u = cf::read_field_binary(mesh_field_path);
                cf::PeriodicGrid grid = u.grid();
                cf::RunConfig sub = cfg;
                sub.grid_n = grid.resolution();
                sub.grid_l = grid.side_length();
                double h = grid.spacing();
                cf::PolygonBoundary poly = cf::load_polygon_json(sub.polygon_path);
                cf::PolygonBoundary fine =
                    cf::resample_polygon(poly, h * sub.resample_edge_fraction);
                cf::ScalarField chi = cf::rasterize_indicator(fine, grid);
                cf::ScalarField phi = cf::phase_field(chi, sub.resolved_eps(h));
                cf::ScalarField mask = cf::interior_mask(phi);
                return cf::FieldArtifacts{std::move(u),   std::move(phi), std::move(mask),
                                          {},             std::move(fine), mesh_field_path,
                                          std::string{}};
            }();
            cf::MeshArtifacts mesh = cf::run_mesh(cfg, art);
            std::printf("singularities %zu blocks %d rejected_faces %zu\n",
                        mesh.singularities.size(), mesh.block_count, mesh.rejected_faces.size());
            std::printf("quality %s\n", mesh.quality.summary().c_str());
            if (!mesh.rejected_faces.empty())
                std::fprintf(stderr, "warning: %zu non-quad faces skipped (partial mesh)\n",
                             mesh.rejected_faces.size());
            return kExitOk;
        });
    }

    if (cmd_sweep->parsed()) {
        return run_guarded([&] {
            cf::RunConfig cfg = resolve_config(ov_sweep);
            if (!sweep_list.empty()) cfg.sweep_alphas = sweep_list;
            if (sweep_workers > 0) cfg.sweep_workers = sweep_workers;
            auto rows = cf::run_sweep(cfg);
            bool any_error = false;
            for (const auto& r : rows) {
                std::printf("alpha %.17g iters %d singularities %d mean_radius %.17g%s%s\n",
                            r.alpha, r.iterations, r.singularity_count, r.mean_radius,
                            r.anomalous ? " [anomalous]" : "",
                            r.error.empty() ? "" : (" error: " + r.error).c_str());
                if (!r.error.empty()) any_error = true;
            }
            return any_error ? kExitPipeline : kExitOk;
        });
    }

    // validate
    return run_guarded([&] {
        cf::PropertySuiteConfig pc;
        pc.trials = validate_trials;
        pc.seed = validate_seed;
        auto reports = cf::property_suite(pc);
        cf::write_reports_jsonl(reports, validate_out);
        bool all_pass = true;
        for (const auto& r : reports) {
            std::printf("%-28s %s  max_abs=%.3g max_rel=%.3g\n", r.name.c_str(),
                        r.pass ? "PASS" : "FAIL", r.max_abs_error, r.max_rel_error);
            if (!r.pass) all_pass = false;
        }
        return all_pass ? kExitOk : kExitPipeline;
    });
}

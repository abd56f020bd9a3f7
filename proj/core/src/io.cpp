#include "crossfield/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "crossfield/errors.hpp"

namespace crossfield {

namespace {

// Artifacts are pinned little-endian; bail out loudly on exotic hosts.
void require_little_endian() {
    std::uint16_t probe = 1;
    unsigned char b;
    std::memcpy(&b, &probe, 1);
    if (b != 1) throw IoError("binary field format requires a little-endian host");
}

}  // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_field_binary(const VectorField2& u, const std::string& path) {
    require_little_endian();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write field dump: " + path);
    std::uint32_t n = std::uint32_t(u.grid().resolution());
    double l = u.grid().side_length();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&l), sizeof l);
    out.write(reinterpret_cast<const char*>(u.comp1().data()),
              std::streamsize(u.comp1().size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(u.comp2().data()),
              std::streamsize(u.comp2().size() * sizeof(double)));
    if (!out) throw IoError("short write on field dump: " + path);
}

VectorField2 read_field_binary(const std::string& path) {
    require_little_endian();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open field dump: " + path);
    std::uint32_t n = 0;
    double l = 0.0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&l), sizeof l);
    if (!in || n == 0) throw IoError("corrupt field dump header: " + path);
    PeriodicGrid grid(int(n), l);
    VectorField2 u(grid);
    in.read(reinterpret_cast<char*>(u.comp1().data()),
            std::streamsize(u.comp1().size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(u.comp2().data()),
            std::streamsize(u.comp2().size() * sizeof(double)));
    if (!in) throw IoError("corrupt field dump payload: " + path);
    if (!u.all_finite()) throw IoError("field dump contains non-finite values: " + path);
    if (u.max_norm_deviation() < 1e-12) u.set_normalized(true);
    return u;
}

void write_scalar_csv(const ScalarField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write scalar CSV: " + path);
    int n = f.grid().resolution();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i) out << ',';
            out << format_g17(f.at(i, j));
        }
        out << '\n';
    }
}

void write_singularities_json(const std::vector<Singularity>& sings,
                              const std::vector<BoundaryDefect>& defects,
                              const std::string& path) {
    nlohmann::ordered_json doc;
    auto& arr = doc["singularities"] = nlohmann::ordered_json::array();
    for (const Singularity& s : sings) {
        nlohmann::ordered_json item;
        item["position"] = {s.position.x, s.position.y};
        item["index"] = s.index;
        item["cell"] = {s.cell_i, s.cell_j};
        item["localized"] = s.localized;
        item["seed_count_mismatch"] = s.seed_count_mismatch;
        auto& seeds = item["seeds"] = nlohmann::ordered_json::array();
        for (const SeparatrixSeed& seed : s.seeds)
            seeds.push_back({{"point", {seed.point.x, seed.point.y}},
                             {"direction", {seed.direction.x, seed.direction.y}}});
        arr.push_back(std::move(item));
    }
    auto& darr = doc["boundary_defects"] = nlohmann::ordered_json::array();
    for (const BoundaryDefect& d : defects)
        darr.push_back({{"position", {d.position.x, d.position.y}},
                        {"vertex", d.vertex},
                        {"interior_angle", d.interior_angle},
                        {"half_loop_index", d.half_loop_index}});
    std::ofstream out(path);
    if (!out) throw IoError("cannot write singularity JSON: " + path);
    out << doc.dump(2) << "\n";
}

void write_streamlines_csv(const std::vector<Streamline>& lines, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write streamline CSV: " + path);
    out << "line,point,x,y\n";
    for (std::size_t s = 0; s < lines.size(); ++s)
        for (std::size_t k = 0; k < lines[s].points.size(); ++k)
            out << s << ',' << k << ',' << format_g17(lines[s].points[k].x) << ','
                << format_g17(lines[s].points[k].y) << '\n';
}

void write_obj(const QuadMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write OBJ: " + path);
    for (const Vec2& v : mesh.vertices)
        out << "v " << format_g17(v.x) << ' ' << format_g17(v.y) << " 0\n";
    for (const auto& q : mesh.quads)
        out << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
}

void write_vtk(const QuadMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write VTK: " + path);
    out << "# vtk DataFile Version 3.0\n";
    out << "crossfield block-structured quad mesh\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.vertices.size() << " double\n";
    for (const Vec2& v : mesh.vertices)
        out << format_g17(v.x) << ' ' << format_g17(v.y) << " 0\n";
    out << "CELLS " << mesh.quads.size() << ' ' << mesh.quads.size() * 5 << '\n';
    for (const auto& q : mesh.quads)
        out << "4 " << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
    out << "CELL_TYPES " << mesh.quads.size() << '\n';
    for (std::size_t k = 0; k < mesh.quads.size(); ++k) out << "9\n";
}

namespace {

struct SvgCanvas {
    std::ofstream out;
    double min_x, min_y, scale, height;

    SvgCanvas(const std::string& path, Vec2 lo, Vec2 hi, double pixels) {
        out.open(path);
        if (!out) throw IoError("cannot write SVG: " + path);
        double span = std::max(hi.x - lo.x, hi.y - lo.y);
        double pad = 0.05 * span;
        lo = lo - Vec2{pad, pad};
        hi = hi + Vec2{pad, pad};
        min_x = lo.x;
        min_y = lo.y;
        scale = pixels / (hi.x - lo.x);
        height = (hi.y - lo.y) * scale;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\""
            << height << "\" viewBox=\"0 0 " << pixels << ' ' << height << "\">\n";
    }
    double px(double x) const { return (x - min_x) * scale; }
    double py(double y) const { return height - (y - min_y) * scale; }
    void polyline(const std::vector<Vec2>& pts, const char* color, double width, bool close) {
        out << "<path d=\"";
        for (std::size_t k = 0; k < pts.size(); ++k)
            out << (k ? " L " : "M ") << px(pts[k].x) << ' ' << py(pts[k].y);
        if (close) out << " Z";
        out << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"/>\n";
    }
    void dot(const Vec2& p, const char* color, double r) {
        out << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y) << "\" r=\"" << r
            << "\" fill=\"" << color << "\"/>\n";
    }
    void close() { out << "</svg>\n"; }
};

}  // namespace

void write_layout_svg(const PolygonBoundary& polygon, const std::vector<Streamline>& lines,
                      const std::vector<Singularity>& sings, const std::string& path,
                      const QuadMesh* mesh) {
    Vec2 lo, hi;
    polygon.bounding_box(lo, hi);
    SvgCanvas svg(path, lo, hi, 800.0);
    if (mesh) {
        for (const auto& q : mesh->quads) {
            std::vector<Vec2> pts = {mesh->vertices[std::size_t(q[0])],
                                     mesh->vertices[std::size_t(q[1])],
                                     mesh->vertices[std::size_t(q[2])],
                                     mesh->vertices[std::size_t(q[3])]};
            svg.polyline(pts, "#b0b0b0", 0.5, true);
        }
    }
    svg.polyline(polygon.vertices(), "black", 1.5, true);
    for (const Streamline& s : lines) svg.polyline(s.points, "red", 1.2, false);
    for (const Singularity& s : sings)
        svg.dot(s.position, s.index > 0 ? "#1f77b4" : "#d62728", 4.0);
    svg.close();
}

void write_field_svg(const VectorField2& u, const ScalarField& mask,
                     const PolygonBoundary& polygon, const std::string& path, int stride) {
    Vec2 lo, hi;
    polygon.bounding_box(lo, hi);
    SvgCanvas svg(path, lo, hi, 800.0);
    svg.polyline(polygon.vertices(), "black", 1.5, true);
    const PeriodicGrid& grid = u.grid();
    double len = 0.4 * grid.spacing() * stride;
    for (int j = 0; j < grid.resolution(); j += stride) {
        for (int i = 0; i < grid.resolution(); i += stride) {
            if (mask.at(i, j) == 0.0) continue;
            double theta = u.cross_angle(i, j);
            Vec2 c = grid.node(i, j);
            for (int k = 0; k < 2; ++k) {
                double a = theta + k * M_PI / 2.0;
                Vec2 d{std::cos(a) * len, std::sin(a) * len};
                svg.polyline({c - d, c + d}, "#2a6fdb", 0.8, false);
            }
        }
    }
    svg.close();
}

}  // namespace crossfield

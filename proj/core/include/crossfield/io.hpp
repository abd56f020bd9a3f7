#pragma once

#include <string>
#include <vector>

#include "crossfield/blocks.hpp"
#include "crossfield/field.hpp"
#include "crossfield/topology.hpp"

namespace crossfield {

// Binary field dump: little-endian header (uint32 N, float64 L) followed by
// the two float64 component planes, x-fastest within each plane.
void write_field_binary(const VectorField2& u, const std::string& path);
VectorField2 read_field_binary(const std::string& path);

void write_scalar_csv(const ScalarField& f, const std::string& path);

// Singularity list as a JSON array of {position, index, seeds}.
void write_singularities_json(const std::vector<Singularity>& sings,
                              const std::vector<BoundaryDefect>& defects,
                              const std::string& path);

// One polyline per block of rows: id,point_index,x,y.
void write_streamlines_csv(const std::vector<Streamline>& lines, const std::string& path);

// Wavefront OBJ with 4-vertex faces.
void write_obj(const QuadMesh& mesh, const std::string& path);

// Legacy ASCII VTK unstructured grid, cell type 9 (VTK_QUAD).
void write_vtk(const QuadMesh& mesh, const std::string& path);

// SVG overlay: domain boundary, separatrices in red, singularity dots.
void write_layout_svg(const PolygonBoundary& polygon, const std::vector<Streamline>& lines,
                      const std::vector<Singularity>& sings, const std::string& path,
                      const QuadMesh* mesh = nullptr);

// SVG cross-field glyph plot (decimated).
void write_field_svg(const VectorField2& u, const ScalarField& mask,
                     const PolygonBoundary& polygon, const std::string& path, int stride = 4);

// Fixed 17-significant-digit float formatting used by every text artifact so
// identical configs produce bit-identical files.
std::string format_g17(double v);

}  // namespace crossfield

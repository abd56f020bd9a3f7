#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossfield/polygon.hpp"
#include "crossfield/solver.hpp"

namespace crossfield {

// Independent brute-force oracles. Nothing here shares code with the
// production spectral/geometry paths: transforms are direct DFT summation,
// point-in-polygon is winding-number based, linear solves are dense
// eliminations. Oracle grids stay small (<= 16x16) so the O(N^4) costs are
// negligible.

struct OracleReport {
    std::string name;
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string instance;

    std::string to_json() const;
};

// Direct DFT summation applying e^{-tau |xi|^2}. A negative tau flips the
// exponent sign, which is used to confirm that the property checks can fail.
ScalarField dense_heat_dft(const ScalarField& f, double tau);
VectorField2 dense_heat_dft(const VectorField2& u, double tau);

// Alternative mode: explicit Euler on the 5-point discrete Laplacian with
// `substeps` steps, approximating the matrix exponential. Its mismatch with
// the spectral semigroup documents the O(h^2) symbol gap of the stencil.
ScalarField dense_heat_fd(const ScalarField& f, double tau, int substeps = 100000);

// Brute-force replay of one solver step built on dense_heat_dft.
VectorField2 brute_force_step(const VectorField2& u, const VectorField2& g, const ScalarField& B,
                              double tau, double eps, double norm_floor);

// Winding-number point-in-polygon (reference for the even-odd rasterizer;
// identical answers for simple polygons off the boundary).
bool point_in_polygon_winding(const Vec2& p, const PolygonBoundary& poly);

// Dense Gaussian elimination for small linear systems (harmonic-map oracle).
std::vector<double> dense_solve(std::vector<double> A, std::vector<double> b, int n);

// Deterministic test-field generators (explicit integer-to-double mapping so
// results are platform independent).
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next_u64();
    double next_double();            // [0,1)
    double next_symmetric();         // [-1,1)
};
VectorField2 random_unit_field(const PeriodicGrid& grid, std::uint64_t seed);
VectorField2 random_field(const PeriodicGrid& grid, std::uint64_t seed, double amplitude = 1.0);
ScalarField random_scalar(const PeriodicGrid& grid, std::uint64_t seed, double lo, double hi);

struct PropertySuiteConfig {
    int trials = 100;
    std::uint64_t seed = 7;
    int grid_n = 16;
    double grid_l = 2.0 * M_PI;
};

// Seeded numerical checks of the operator facts and energy lemma:
// contraction, self-adjointness, semigroup law, positivity, concavity,
// Frechet derivative, lower bound, and one-step energy monotonicity
// (including the tau = 1e-8 extreme). Failures become report entries, not
// exceptions.
std::vector<OracleReport> property_suite(const PropertySuiteConfig& config);

void write_reports_jsonl(const std::vector<OracleReport>& reports, const std::string& path);

}  // namespace crossfield

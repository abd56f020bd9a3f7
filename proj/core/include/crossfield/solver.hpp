#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossfield/field.hpp"
#include "crossfield/spectral.hpp"

namespace crossfield {

struct SolverConfig {
    double tau = 0.0;               // diffusion time per iteration
    double eps = 0.0;               // diffuse-interface width
    double tol = 1e-7;              // RMS update threshold
    int max_iter = 20000;
    double norm_floor = 1e-14;      // denominator guard in the projection
    std::uint64_t seed = 20240801;  // interior initialization seed
    int energy_stride = 1;          // energies evaluated every k-th iteration
};

struct TraceRecord {
    int iter = 0;
    double energy_modified = 0.0;
    double energy_dirichlet_inner = 0.0;
    double update_rms = 0.0;
    std::int64_t guarded_nodes = 0;
};

struct SolveTrace {
    std::vector<TraceRecord> records;
    bool converged = false;       // false => stopped at max_iter
    int iterations = 0;

    // Theorem-backed invariant: energy_modified is non-increasing in k.
    bool energy_monotone(double rel_slack = 1e-10) const;
};

// Modified relaxed energy
//   E = sum_nodes [ -(1/2 tau) <u, e^{tau L} u> - (1/eps^3) B <u, g> ] h^2,
// folding the squared half-time semigroup into one full application via
// self-adjointness. Requires u flagged unit-norm; throws NotNormalized.
double modified_energy(const SpectralPlan& plan, const VectorField2& u, const VectorField2& g,
                       const ScalarField& B, double tau, double eps);

// Same functional without the unit-norm requirement; the form the concavity
// and derivative properties hold on.
double energy_functional(const SpectralPlan& plan, const VectorField2& u, const VectorField2& g,
                         const ScalarField& B, double tau, double eps);

// (1/2) sum_{mask=1} |grad u|^2 h^2 with periodic central differences.
double inner_dirichlet_energy(const VectorField2& u, const ScalarField& mask);

// One diffusion-normalization sweep:
//   v = e^{tau L} u + (tau/eps^3) B g;  u' = v/|v|  where |v| >= norm_floor,
// and u' = u at guarded nodes. guarded_nodes, when non-null, receives the
// count of guarded nodes.
VectorField2 step(const SpectralPlan& plan, const VectorField2& u, const VectorField2& g,
                  const ScalarField& B, double tau, double eps, double norm_floor,
                  std::int64_t* guarded_nodes = nullptr);

// Default initialization: g/|g| where |g| > norm_floor, deterministic random
// unit vectors elsewhere.
VectorField2 initial_field(const VectorField2& g, double norm_floor, std::uint64_t seed);

struct SolveResult {
    VectorField2 u;
    SolveTrace trace;
};

// Runs the iteration until the area-normalized RMS update drops below tol or
// max_iter is reached. mask selects the nodes of the inner Dirichlet
// diagnostic (typically interior_mask(phi)).
SolveResult solve(const SpectralPlan& plan, const VectorField2& u0, const VectorField2& g,
                  const ScalarField& B, const ScalarField& mask, const SolverConfig& config);

void write_trace_csv(const SolveTrace& trace, const std::string& path);

}  // namespace crossfield

#pragma once

#include <memory>

#include "crossfield/field.hpp"

namespace crossfield {

// Periodic-spectral engine: forward/inverse real FFTs plus diagonal
// multipliers in frequency space. Frequencies follow xi = 2*pi*k/L with
// integer wave numbers k in [-N/2, N/2), so a multiplier for a fixed
// physical tau or sigma is resolution independent.
//
// A plan is immutable after construction and shareable across threads; each
// transform call works on its own scratch buffers.
class SpectralPlan {
  public:
    explicit SpectralPlan(const PeriodicGrid& grid);
    ~SpectralPlan();

    SpectralPlan(const SpectralPlan&) = delete;
    SpectralPlan& operator=(const SpectralPlan&) = delete;

    const PeriodicGrid& grid() const;

    // Applies the diagonal multiplier e^{-tau |xi|^2} in place of f's data.
    // The xi = 0 multiplier is exactly 1, so the mean is preserved.
    void apply_heat_multiplier(ScalarField& f, double tau) const;
    void apply_heat_multiplier_raw(std::vector<double>& values, double tau) const;

    // |xi|^2 at r2c frequency slot (kx, ky_half); exposed for oracles/tests.
    double xi_squared(int kx, int ky_half) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// e^{tau Laplacian} applied componentwise; exact periodic heat semigroup.
ScalarField heat_semigroup(const SpectralPlan& plan, const ScalarField& f, double tau);
VectorField2 heat_semigroup(const SpectralPlan& plan, const VectorField2& u, double tau);

// Gaussian filter G_sigma (variance sigma^2): multiplier e^{-sigma^2 |xi|^2/2},
// i.e. heat_semigroup with tau = sigma^2 / 2.
ScalarField gaussian_filter(const SpectralPlan& plan, const ScalarField& f, double sigma);
VectorField2 gaussian_filter(const SpectralPlan& plan, const VectorField2& u, double sigma);

}  // namespace crossfield

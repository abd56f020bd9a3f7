#include "crossfield/spectral.hpp"

#include <cmath>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "crossfield/errors.hpp"

namespace crossfield {

namespace {

// FFTW planner calls are not thread-safe; executions on distinct buffers are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    double* real = nullptr;
    fftw_complex* freq = nullptr;
    FftwBuffer(std::size_t nr, std::size_t nc) {
        real = fftw_alloc_real(nr);
        freq = fftw_alloc_complex(nc);
        if (!real || !freq) throw Error("fftw allocation failure");
    }
    ~FftwBuffer() {
        fftw_free(real);
        fftw_free(freq);
    }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

struct SpectralPlan::Impl {
    PeriodicGrid grid;
    int n;
    int n_half;  // N/2 + 1 slots in the contiguous (x) direction
    std::vector<double> xi2;  // |xi|^2 per r2c slot, kx-fastest
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit Impl(const PeriodicGrid& g) : grid(g), n(g.resolution()), n_half(g.resolution() / 2 + 1) {
        double k_unit = 2.0 * M_PI / grid.side_length();
        xi2.resize(std::size_t(n) * std::size_t(n_half));
        for (int ky = 0; ky < n; ++ky) {
            int wy = ky <= n / 2 ? ky : ky - n;
            for (int kx = 0; kx < n_half; ++kx) {
                double xx = k_unit * kx;
                double yy = k_unit * wy;
                xi2[std::size_t(ky) * std::size_t(n_half) + std::size_t(kx)] = xx * xx + yy * yy;
            }
        }

        // Field storage is x-fastest (values[j*N + i]), so the transform rows
        // run along x: n0 = N rows of length N.
        FftwBuffer probe(std::size_t(n) * std::size_t(n), std::size_t(n) * std::size_t(n_half));
        std::lock_guard<std::mutex> lock(planner_mutex());
        forward = fftw_plan_dft_r2c_2d(n, n, probe.real, probe.freq, FFTW_MEASURE);
        backward = fftw_plan_dft_c2r_2d(n, n, probe.freq, probe.real, FFTW_MEASURE);
        if (!forward || !backward) throw Error("fftw planning failure");
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }

    // out[k] := e^{-tau |xi_k|^2}; tau = 0 gives the exact identity.
    void multiply_heat(std::vector<double>& values, double tau) const {
        std::size_t nn = std::size_t(n) * std::size_t(n);
        FftwBuffer buf(nn, std::size_t(n) * std::size_t(n_half));
        for (std::size_t k = 0; k < nn; ++k) buf.real[k] = values[k];
        fftw_execute_dft_r2c(forward, buf.real, buf.freq);
        double scale = 1.0 / double(nn);
        std::size_t nf = std::size_t(n) * std::size_t(n_half);
        for (std::size_t k = 0; k < nf; ++k) {
            // exp(-tau * 0) == 1 exactly, so the mean is untouched.
            double m = std::exp(-tau * xi2[k]) * scale;
            buf.freq[k][0] *= m;
            buf.freq[k][1] *= m;
        }
        fftw_execute_dft_c2r(backward, buf.freq, buf.real);
        for (std::size_t k = 0; k < nn; ++k) values[k] = buf.real[k];
    }
};

SpectralPlan::SpectralPlan(const PeriodicGrid& grid) : impl_(std::make_unique<Impl>(grid)) {}
SpectralPlan::~SpectralPlan() = default;

const PeriodicGrid& SpectralPlan::grid() const { return impl_->grid; }

void SpectralPlan::apply_heat_multiplier(ScalarField& f, double tau) const {
    if (!(f.grid() == impl_->grid)) throw InvalidArgument("SpectralPlan: grid mismatch");
    if (tau < 0.0) throw InvalidArgument("SpectralPlan: tau must be >= 0");
    impl_->multiply_heat(f.data(), tau);
}

void SpectralPlan::apply_heat_multiplier_raw(std::vector<double>& values, double tau) const {
    if (values.size() != std::size_t(impl_->grid.node_count()))
        throw InvalidArgument("SpectralPlan: buffer size mismatch");
    if (tau < 0.0) throw InvalidArgument("SpectralPlan: tau must be >= 0");
    impl_->multiply_heat(values, tau);
}

double SpectralPlan::xi_squared(int kx, int ky_half) const {
    return impl_->xi2[std::size_t(ky_half) * std::size_t(impl_->n_half) + std::size_t(kx)];
}

ScalarField heat_semigroup(const SpectralPlan& plan, const ScalarField& f, double tau) {
    ScalarField out = f;
    plan.apply_heat_multiplier(out, tau);
    return out;
}

VectorField2 heat_semigroup(const SpectralPlan& plan, const VectorField2& u, double tau) {
    if (!(u.grid() == plan.grid())) throw InvalidArgument("heat_semigroup: grid mismatch");
    if (tau < 0.0) throw InvalidArgument("heat_semigroup: tau must be >= 0");
    VectorField2 out = u;
    out.set_normalized(false);
    plan.apply_heat_multiplier_raw(out.comp1(), tau);
    plan.apply_heat_multiplier_raw(out.comp2(), tau);
    return out;
}

ScalarField gaussian_filter(const SpectralPlan& plan, const ScalarField& f, double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("gaussian_filter: sigma must be > 0");
    return heat_semigroup(plan, f, 0.5 * sigma * sigma);
}

VectorField2 gaussian_filter(const SpectralPlan& plan, const VectorField2& u, double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("gaussian_filter: sigma must be > 0");
    return heat_semigroup(plan, u, 0.5 * sigma * sigma);
}

}  // namespace crossfield

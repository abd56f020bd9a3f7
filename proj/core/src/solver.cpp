#include "crossfield/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "crossfield/errors.hpp"

namespace crossfield {

namespace {

// Explicit 64-bit mix so initialization is identical across platforms.
struct Mix64 {
    std::uint64_t s;
    explicit Mix64(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
};

// E evaluated from the precomputed w = e^{tau L} u, folding the squared
// half-time semigroup into one application via self-adjointness.
double energy_terms(const PeriodicGrid& grid, const VectorField2& u, const VectorField2& w_heat,
                    const VectorField2& g, const ScalarField& B, double tau, double eps) {
    const auto& u1 = u.comp1();
    const auto& u2 = u.comp2();
    const auto& w1 = w_heat.comp1();
    const auto& w2 = w_heat.comp2();
    const auto& g1 = g.comp1();
    const auto& g2 = g.comp2();
    const auto& b = B.data();
    double diff = 0.0;
    double pen = 0.0;
    for (std::size_t k = 0; k < u1.size(); ++k) {
        diff += u1[k] * w1[k] + u2[k] * w2[k];
        pen += b[k] * (u1[k] * g1[k] + u2[k] * g2[k]);
    }
    double h2 = grid.spacing() * grid.spacing();
    return (-diff / (2.0 * tau) - pen / (eps * eps * eps)) * h2;
}

// u_next = (w + (tau/eps^3) B g) / |...| with the norm-floor guard keeping
// the previous value. Returns the guarded-node count.
std::int64_t project_step(const VectorField2& u_prev, const VectorField2& w_heat,
                          const VectorField2& g, const ScalarField& B, double coeff,
                          double norm_floor, VectorField2& out) {
    const auto& u1 = u_prev.comp1();
    const auto& u2 = u_prev.comp2();
    const auto& w1 = w_heat.comp1();
    const auto& w2 = w_heat.comp2();
    const auto& g1 = g.comp1();
    const auto& g2 = g.comp2();
    const auto& b = B.data();
    auto& o1 = out.comp1();
    auto& o2 = out.comp2();
    std::int64_t guarded = 0;
    for (std::size_t k = 0; k < u1.size(); ++k) {
        double a = w1[k] + coeff * b[k] * g1[k];
        double c = w2[k] + coeff * b[k] * g2[k];
        double norm = std::sqrt(a * a + c * c);
        if (norm >= norm_floor) {
            o1[k] = a / norm;
            o2[k] = c / norm;
        } else {
            o1[k] = u1[k];
            o2[k] = u2[k];
            ++guarded;
        }
    }
    out.set_normalized(true);
    return guarded;
}

void check_inputs(const SpectralPlan& plan, const VectorField2& u, const VectorField2& g,
                  const ScalarField& B, double tau, double eps) {
    if (!(u.grid() == plan.grid()) || !(g.grid() == plan.grid()) || !(B.grid() == plan.grid()))
        throw InvalidArgument("solver: grid mismatch");
    if (!(tau > 0.0) || !(eps > 0.0)) throw InvalidArgument("solver: tau and eps must be > 0");
}

}  // namespace

bool SolveTrace::energy_monotone(double rel_slack) const {
    for (std::size_t k = 1; k < records.size(); ++k) {
        double prev = records[k - 1].energy_modified;
        double cur = records[k].energy_modified;
        if (cur > prev + rel_slack * std::fabs(prev)) return false;
    }
    return true;
}

double modified_energy(const SpectralPlan& plan, const VectorField2& u, const VectorField2& g,
                       const ScalarField& B, double tau, double eps) {
    if (!u.normalized()) throw NotNormalized("modified_energy requires a unit-norm field");
    return energy_functional(plan, u, g, B, tau, eps);
}

double energy_functional(const SpectralPlan& plan, const VectorField2& u, const VectorField2& g,
                         const ScalarField& B, double tau, double eps) {
    check_inputs(plan, u, g, B, tau, eps);
    VectorField2 w = heat_semigroup(plan, u, tau);
    return energy_terms(plan.grid(), u, w, g, B, tau, eps);
}

double inner_dirichlet_energy(const VectorField2& u, const ScalarField& mask) {
    const PeriodicGrid& grid = u.grid();
    if (!(mask.grid() == grid)) throw InvalidArgument("inner_dirichlet_energy: grid mismatch");
    int n = grid.resolution();
    double inv2h = 1.0 / (2.0 * grid.spacing());
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (mask.at(i, j) == 0.0) continue;
            double dx1 = (u.x(i + 1, j) - u.x(i - 1, j)) * inv2h;
            double dy1 = (u.x(i, j + 1) - u.x(i, j - 1)) * inv2h;
            double dx2 = (u.y(i + 1, j) - u.y(i - 1, j)) * inv2h;
            double dy2 = (u.y(i, j + 1) - u.y(i, j - 1)) * inv2h;
            sum += dx1 * dx1 + dy1 * dy1 + dx2 * dx2 + dy2 * dy2;
        }
    }
    double h2 = grid.spacing() * grid.spacing();
    return 0.5 * sum * h2;
}

VectorField2 step(const SpectralPlan& plan, const VectorField2& u, const VectorField2& g,
                  const ScalarField& B, double tau, double eps, double norm_floor,
                  std::int64_t* guarded_nodes) {
    check_inputs(plan, u, g, B, tau, eps);
    VectorField2 w = heat_semigroup(plan, u, tau);
    VectorField2 out(u.grid());
    std::int64_t guarded =
        project_step(u, w, g, B, tau / (eps * eps * eps), norm_floor, out);
    if (guarded_nodes) *guarded_nodes = guarded;
    return out;
}

VectorField2 initial_field(const VectorField2& g, double norm_floor, std::uint64_t seed) {
    VectorField2 u = g;
    Mix64 rng(seed);
    auto& u1 = u.comp1();
    auto& u2 = u.comp2();
    for (std::size_t k = 0; k < u1.size(); ++k) {
        double norm = std::hypot(u1[k], u2[k]);
        if (norm > norm_floor) {
            u1[k] /= norm;
            u2[k] /= norm;
        } else {
            double a = 2.0 * M_PI * rng.uniform();
            u1[k] = std::cos(a);
            u2[k] = std::sin(a);
        }
    }
    u.set_normalized(true);
    return u;
}

SolveResult solve(const SpectralPlan& plan, const VectorField2& u0, const VectorField2& g,
                  const ScalarField& B, const ScalarField& mask, const SolverConfig& config) {
    check_inputs(plan, u0, g, B, config.tau, config.eps);
    if (!u0.normalized()) throw NotNormalized("solve requires a unit-norm initial field");
    if (!(config.tol > 0.0) || config.max_iter < 1)
        throw InvalidArgument("solve: tol must be > 0 and max_iter >= 1");

    const double tau = config.tau;
    const double eps = config.eps;
    const double coeff = tau / (eps * eps * eps);
    const double inv_nodes = 1.0 / double(plan.grid().node_count());
    const int stride = std::max(1, config.energy_stride);

    SolveResult res{u0, {}};
    VectorField2& u = res.u;
    SolveTrace& trace = res.trace;

    VectorField2 next(u.grid());
    double rms = 0.0;
    std::int64_t guarded = 0;

    // Row k of the trace describes iterate u_k; update_rms is the distance
    // from u_{k-1}. One semigroup application per iteration serves both the
    // energy of u_k and the step to u_{k+1}.
    for (int k = 0; k <= config.max_iter; ++k) {
        VectorField2 w = heat_semigroup(plan, u, tau);

        TraceRecord rec;
        rec.iter = k;
        rec.update_rms = rms;
        rec.guarded_nodes = guarded;
        if (k % stride == 0 || k == config.max_iter || trace.converged) {
            rec.energy_modified = energy_terms(plan.grid(), u, w, g, B, tau, eps);
            rec.energy_dirichlet_inner = inner_dirichlet_energy(u, mask);
        } else {
            rec.energy_modified = trace.records.back().energy_modified;
            rec.energy_dirichlet_inner = trace.records.back().energy_dirichlet_inner;
        }
        trace.records.push_back(rec);
        trace.iterations = k;

        if (trace.converged || k == config.max_iter) break;

        guarded = project_step(u, w, g, B, coeff, config.norm_floor, next);

        double sq = 0.0;
        const auto& a1 = u.comp1();
        const auto& a2 = u.comp2();
        const auto& b1 = next.comp1();
        const auto& b2 = next.comp2();
        for (std::size_t t = 0; t < a1.size(); ++t) {
            double d1 = b1[t] - a1[t];
            double d2 = b2[t] - a2[t];
            sq += d1 * d1 + d2 * d2;
        }
        // Grid-area-normalized RMS: sqrt(sum |du|^2 h^2 / L^2).
        rms = std::sqrt(sq * inv_nodes);

        std::swap(u, next);
        if (rms < config.tol) trace.converged = true;
    }
    return res;
}

void write_trace_csv(const SolveTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trace CSV: " + path);
    out << "iter,E_modified,E_dirichlet_inner,update_rms,guarded_nodes\n";
    char buf[160];
    for (const TraceRecord& r : trace.records) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%lld\n", r.iter, r.energy_modified,
                      r.energy_dirichlet_inner, r.update_rms, (long long)r.guarded_nodes);
        out << buf;
    }
}

}  // namespace crossfield

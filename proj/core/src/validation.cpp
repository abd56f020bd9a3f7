#include "crossfield/validation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include "crossfield/errors.hpp"

namespace crossfield {

namespace {

// Direct O(N^4) DFT pair; deliberately independent of the FFT path.
std::vector<std::complex<double>> naive_dft2(const std::vector<double>& f, int n) {
    std::vector<std::complex<double>> out(std::size_t(n) * std::size_t(n));
    for (int ky = 0; ky < n; ++ky) {
        for (int kx = 0; kx < n; ++kx) {
            std::complex<double> acc = 0.0;
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    double phase = -2.0 * M_PI * (double(kx) * i + double(ky) * j) / n;
                    acc += f[std::size_t(j) * std::size_t(n) + std::size_t(i)] *
                           std::complex<double>(std::cos(phase), std::sin(phase));
                }
            }
            out[std::size_t(ky) * std::size_t(n) + std::size_t(kx)] = acc;
        }
    }
    return out;
}

std::vector<double> naive_idft2(const std::vector<std::complex<double>>& F, int n) {
    std::vector<double> out(std::size_t(n) * std::size_t(n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            std::complex<double> acc = 0.0;
            for (int ky = 0; ky < n; ++ky) {
                for (int kx = 0; kx < n; ++kx) {
                    double phase = 2.0 * M_PI * (double(kx) * i + double(ky) * j) / n;
                    acc += F[std::size_t(ky) * std::size_t(n) + std::size_t(kx)] *
                           std::complex<double>(std::cos(phase), std::sin(phase));
                }
            }
            out[std::size_t(j) * std::size_t(n) + std::size_t(i)] = acc.real() / (double(n) * n);
        }
    }
    return out;
}

std::vector<double> dense_heat_component(const std::vector<double>& f, const PeriodicGrid& grid,
                                         double tau) {
    int n = grid.resolution();
    auto F = naive_dft2(f, n);
    double k_unit = 2.0 * M_PI / grid.side_length();
    for (int ky = 0; ky < n; ++ky) {
        int wy = ky <= n / 2 ? ky : ky - n;
        for (int kx = 0; kx < n; ++kx) {
            int wx = kx <= n / 2 ? kx : kx - n;
            double xi2 = k_unit * k_unit * (double(wx) * wx + double(wy) * wy);
            F[std::size_t(ky) * std::size_t(n) + std::size_t(kx)] *= std::exp(-tau * xi2);
        }
    }
    return naive_idft2(F, n);
}

double l2_inner(const VectorField2& a, const VectorField2& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.comp1().size(); ++k)
        s += a.comp1()[k] * b.comp1()[k] + a.comp2()[k] * b.comp2()[k];
    return s * a.grid().spacing() * a.grid().spacing();
}

double l2_norm(const VectorField2& a) { return std::sqrt(l2_inner(a, a)); }

}  // namespace

std::uint64_t SplitMix64::next_u64() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
double SplitMix64::next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }
double SplitMix64::next_symmetric() { return 2.0 * next_double() - 1.0; }

std::string OracleReport::to_json() const {
    std::ostringstream os;
    os << "{\"name\":\"" << name << "\",\"max_abs_error\":" << max_abs_error
       << ",\"max_rel_error\":" << max_rel_error << ",\"tolerance\":" << tolerance
       << ",\"pass\":" << (pass ? "true" : "false") << ",\"instance\":\"" << instance << "\"}";
    return os.str();
}

ScalarField dense_heat_dft(const ScalarField& f, double tau) {
    if (f.grid().resolution() > 16)
        throw InvalidArgument("dense_heat_dft: oracle grids are capped at 16x16");
    ScalarField out(f.grid());
    out.data() = dense_heat_component(f.data(), f.grid(), tau);
    return out;
}

VectorField2 dense_heat_dft(const VectorField2& u, double tau) {
    if (u.grid().resolution() > 16)
        throw InvalidArgument("dense_heat_dft: oracle grids are capped at 16x16");
    VectorField2 out(u.grid());
    out.comp1() = dense_heat_component(u.comp1(), u.grid(), tau);
    out.comp2() = dense_heat_component(u.comp2(), u.grid(), tau);
    return out;
}

ScalarField dense_heat_fd(const ScalarField& f, double tau, int substeps) {
    const PeriodicGrid& grid = f.grid();
    if (grid.resolution() > 16)
        throw InvalidArgument("dense_heat_fd: oracle grids are capped at 16x16");
    int n = grid.resolution();
    double dt = tau / substeps;
    double r = dt / (grid.spacing() * grid.spacing());
    ScalarField cur = f;
    ScalarField nxt(grid);
    for (int s = 0; s < substeps; ++s) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                nxt.at(i, j) = cur.at(i, j) + r * (cur.at(i + 1, j) + cur.at(i - 1, j) +
                                                   cur.at(i, j + 1) + cur.at(i, j - 1) -
                                                   4.0 * cur.at(i, j));
        std::swap(cur, nxt);
    }
    return cur;
}

VectorField2 brute_force_step(const VectorField2& u, const VectorField2& g, const ScalarField& B,
                              double tau, double eps, double norm_floor) {
    VectorField2 w = dense_heat_dft(u, tau);
    double coeff = tau / (eps * eps * eps);
    VectorField2 out(u.grid());
    for (std::size_t k = 0; k < w.comp1().size(); ++k) {
        double a = w.comp1()[k] + coeff * B.data()[k] * g.comp1()[k];
        double c = w.comp2()[k] + coeff * B.data()[k] * g.comp2()[k];
        double norm = std::sqrt(a * a + c * c);
        if (norm >= norm_floor) {
            out.comp1()[k] = a / norm;
            out.comp2()[k] = c / norm;
        } else {
            out.comp1()[k] = u.comp1()[k];
            out.comp2()[k] = u.comp2()[k];
        }
    }
    out.set_normalized(true);
    return out;
}

bool point_in_polygon_winding(const Vec2& p, const PolygonBoundary& poly) {
    double total = 0.0;
    for (int i = 0; i < poly.size(); ++i) {
        Vec2 a = poly.segment_start(i) - p;
        Vec2 b = poly.segment_end(i) - p;
        total += std::atan2(a.cross(b), a.dot(b));
    }
    return std::fabs(total) > M_PI;
}

std::vector<double> dense_solve(std::vector<double> A, std::vector<double> b, int n) {
    // Gaussian elimination with partial pivoting; A is row-major n x n.
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[std::size_t(r) * std::size_t(n) + std::size_t(col)]) >
                std::fabs(A[std::size_t(pivot) * std::size_t(n) + std::size_t(col)]))
                pivot = r;
        if (A[std::size_t(pivot) * std::size_t(n) + std::size_t(col)] == 0.0)
            throw InvalidArgument("dense_solve: singular matrix");
        if (pivot != col) {
            for (int c = 0; c < n; ++c)
                std::swap(A[std::size_t(pivot) * std::size_t(n) + std::size_t(c)],
                          A[std::size_t(col) * std::size_t(n) + std::size_t(c)]);
            std::swap(b[std::size_t(pivot)], b[std::size_t(col)]);
        }
        double d = A[std::size_t(col) * std::size_t(n) + std::size_t(col)];
        for (int r = col + 1; r < n; ++r) {
            double factor = A[std::size_t(r) * std::size_t(n) + std::size_t(col)] / d;
            if (factor == 0.0) continue;
            for (int c = col; c < n; ++c)
                A[std::size_t(r) * std::size_t(n) + std::size_t(c)] -=
                    factor * A[std::size_t(col) * std::size_t(n) + std::size_t(c)];
            b[std::size_t(r)] -= factor * b[std::size_t(col)];
        }
    }
    std::vector<double> x(std::size_t(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[std::size_t(r)];
        for (int c = r + 1; c < n; ++c)
            s -= A[std::size_t(r) * std::size_t(n) + std::size_t(c)] * x[std::size_t(c)];
        x[std::size_t(r)] = s / A[std::size_t(r) * std::size_t(n) + std::size_t(r)];
    }
    return x;
}

VectorField2 random_unit_field(const PeriodicGrid& grid, std::uint64_t seed) {
    VectorField2 u(grid);
    SplitMix64 rng(seed);
    for (std::size_t k = 0; k < u.comp1().size(); ++k) {
        double a = 2.0 * M_PI * rng.next_double();
        u.comp1()[k] = std::cos(a);
        u.comp2()[k] = std::sin(a);
    }
    u.set_normalized(true);
    return u;
}

VectorField2 random_field(const PeriodicGrid& grid, std::uint64_t seed, double amplitude) {
    VectorField2 u(grid);
    SplitMix64 rng(seed);
    for (std::size_t k = 0; k < u.comp1().size(); ++k) {
        u.comp1()[k] = amplitude * rng.next_symmetric();
        u.comp2()[k] = amplitude * rng.next_symmetric();
    }
    return u;
}

ScalarField random_scalar(const PeriodicGrid& grid, std::uint64_t seed, double lo, double hi) {
    ScalarField f(grid);
    SplitMix64 rng(seed);
    for (double& v : f.data()) v = lo + (hi - lo) * rng.next_double();
    return f;
}

std::vector<OracleReport> property_suite(const PropertySuiteConfig& config) {
    PeriodicGrid grid(config.grid_n, config.grid_l);
    SpectralPlan plan(grid);
    std::vector<OracleReport> out;

    auto run = [&](const std::string& name, double tol, bool relative,
                   auto&& trial) {
        OracleReport rep;
        rep.name = name;
        rep.tolerance = tol;
        std::ostringstream inst;
        inst << "grid=" << config.grid_n << " trials=" << config.trials
             << " seed=" << config.seed;
        rep.instance = inst.str();
        for (int t = 0; t < config.trials; ++t) {
            auto [abs_err, rel_err] = trial(std::uint64_t(config.seed + 1000003ULL * t));
            rep.max_abs_error = std::max(rep.max_abs_error, abs_err);
            rep.max_rel_error = std::max(rep.max_rel_error, rel_err);
        }
        rep.pass = (relative ? rep.max_rel_error : rep.max_abs_error) <= tol;
        out.push_back(rep);
    };

    const double taus[] = {1e-8, 1e-3, 0.05, 0.5};

    // Contraction: ||e^{tau L} u|| <= ||u||.
    run("heat_contraction", 1e-12, false, [&](std::uint64_t s) {
        SplitMix64 pick(s);
        double tau = taus[pick.next_u64() % 4];
        VectorField2 u = random_field(grid, s);
        double before = l2_norm(u);
        double after = l2_norm(heat_semigroup(plan, u, tau));
        double viol = std::max(0.0, after - before);
        return std::pair{viol, viol / std::max(before, 1e-300)};
    });

    // Self-adjointness: <e^{tau L} u, v> = <u, e^{tau L} v>.
    run("heat_self_adjoint", 1e-12, true, [&](std::uint64_t s) {
        SplitMix64 pick(s);
        double tau = taus[pick.next_u64() % 4];
        VectorField2 u = random_field(grid, s);
        VectorField2 v = random_field(grid, s ^ 0xabcdef12345ULL);
        double a = l2_inner(heat_semigroup(plan, u, tau), v);
        double b = l2_inner(u, heat_semigroup(plan, v, tau));
        double abs_err = std::fabs(a - b);
        return std::pair{abs_err, abs_err / std::max(std::fabs(a), 1e-300)};
    });

    // Semigroup law: e^{tau L} e^{s L} u = e^{(tau+s) L} u.
    run("heat_semigroup_law", 1e-12, false, [&](std::uint64_t s) {
        SplitMix64 pick(s);
        double t1 = taus[pick.next_u64() % 4];
        double t2 = taus[pick.next_u64() % 4];
        VectorField2 u = random_field(grid, s);
        VectorField2 a = heat_semigroup(plan, heat_semigroup(plan, u, t1), t2);
        VectorField2 b = heat_semigroup(plan, u, t1 + t2);
        double worst = 0.0;
        for (std::size_t k = 0; k < a.comp1().size(); ++k)
            worst = std::max({worst, std::fabs(a.comp1()[k] - b.comp1()[k]),
                              std::fabs(a.comp2()[k] - b.comp2()[k])});
        return std::pair{worst, worst};
    });

    // Positivity: u >= 0 implies e^{tau L} u >= -1e-10.
    run("heat_positivity", 1e-10, false, [&](std::uint64_t s) {
        SplitMix64 pick(s);
        double tau = taus[pick.next_u64() % 4];
        ScalarField f = random_scalar(grid, s, 0.0, 1.0);
        ScalarField g = heat_semigroup(plan, f, tau);
        double worst = 0.0;
        for (double v : g.data()) worst = std::max(worst, -v);
        return std::pair{worst, worst};
    });

    // Concavity of the unconstrained functional.
    run("energy_concavity", 1e-10, false, [&](std::uint64_t s) {
        SplitMix64 pick(s);
        double tau = taus[pick.next_u64() % 4];
        double eps = 0.05 + 0.5 * pick.next_double();
        VectorField2 u = random_field(grid, s);
        VectorField2 v = random_field(grid, s ^ 0x5555aaaaULL);
        VectorField2 g = random_unit_field(grid, s ^ 0x777ULL);
        ScalarField B = random_scalar(grid, s ^ 0x999ULL, 0.0, 1.0 / 16.0);
        double lam = pick.next_double();
        VectorField2 mix(grid);
        for (std::size_t k = 0; k < mix.comp1().size(); ++k) {
            mix.comp1()[k] = lam * u.comp1()[k] + (1.0 - lam) * v.comp1()[k];
            mix.comp2()[k] = lam * u.comp2()[k] + (1.0 - lam) * v.comp2()[k];
        }
        double lhs = energy_functional(plan, mix, g, B, tau, eps);
        double rhs = lam * energy_functional(plan, u, g, B, tau, eps) +
                     (1.0 - lam) * energy_functional(plan, v, g, B, tau, eps);
        double viol = std::max(0.0, rhs - lhs);  // need lhs >= rhs
        return std::pair{viol, viol / std::max(std::fabs(rhs), 1e-300)};
    });

    // Frechet derivative against the finite difference quotient at a = 1e-5.
    run("energy_frechet_derivative", 1e-4, true, [&](std::uint64_t s) {
        SplitMix64 pick(s);
        double tau = taus[1 + pick.next_u64() % 3];  // skip 1e-8: quotient cancels
        double eps = 0.05 + 0.5 * pick.next_double();
        double a = 1e-5;
        VectorField2 u = random_unit_field(grid, s);
        VectorField2 v = random_field(grid, s ^ 0xfeedULL);
        VectorField2 g = random_unit_field(grid, s ^ 0x777ULL);
        ScalarField B = random_scalar(grid, s ^ 0x999ULL, 0.0, 1.0 / 16.0);
        VectorField2 pert(grid);
        for (std::size_t k = 0; k < pert.comp1().size(); ++k) {
            pert.comp1()[k] = u.comp1()[k] + a * v.comp1()[k];
            pert.comp2()[k] = u.comp2()[k] + a * v.comp2()[k];
        }
        double quotient =
            (energy_functional(plan, pert, g, B, tau, eps) -
             energy_functional(plan, u, g, B, tau, eps)) /
            a;
        // <-(1/tau) e^{tau L} u - (1/eps^3) B g, v>
        VectorField2 w = heat_semigroup(plan, u, tau);
        double inner = 0.0;
        double e3 = eps * eps * eps;
        for (std::size_t k = 0; k < w.comp1().size(); ++k) {
            inner += (-w.comp1()[k] / tau - B.data()[k] * g.comp1()[k] / e3) * v.comp1()[k];
            inner += (-w.comp2()[k] / tau - B.data()[k] * g.comp2()[k] / e3) * v.comp2()[k];
        }
        inner *= grid.spacing() * grid.spacing();
        double abs_err = std::fabs(quotient - inner);
        return std::pair{abs_err, abs_err / std::max(std::fabs(inner), 1e-300)};
    });

    // Lemma lower bound on the admissible set: E >= -(1/tau + 1/eps^3)|Omega|.
    run("energy_lower_bound", 0.0, false, [&](std::uint64_t s) {
        SplitMix64 pick(s);
        double tau = taus[pick.next_u64() % 4];
        double eps = 0.05 + 0.5 * pick.next_double();
        VectorField2 u = random_unit_field(grid, s);
        VectorField2 g = random_unit_field(grid, s ^ 0x777ULL);
        ScalarField B = random_scalar(grid, s ^ 0x999ULL, 0.0, 1.0 / 16.0);
        double e = modified_energy(plan, u, g, B, tau, eps);
        double bound = -(1.0 / tau + 1.0 / (eps * eps * eps)) * grid.area();
        double viol = std::max(0.0, bound - e);
        return std::pair{viol, viol / std::fabs(bound)};
    });

    // One-step energy decrease, unconditional in (tau, eps).
    run("step_energy_monotone", 1e-10, true, [&](std::uint64_t s) {
        SplitMix64 pick(s);
        double tau = taus[pick.next_u64() % 4];
        double eps = 0.02 + 0.5 * pick.next_double();
        VectorField2 u = random_unit_field(grid, s);
        VectorField2 g = random_unit_field(grid, s ^ 0x777ULL);
        ScalarField B = random_scalar(grid, s ^ 0x999ULL, 0.0, 1.0 / 16.0);
        double before = modified_energy(plan, u, g, B, tau, eps);
        VectorField2 next = step(plan, u, g, B, tau, eps, 1e-14);
        double after = modified_energy(plan, next, g, B, tau, eps);
        double viol = std::max(0.0, after - before);
        return std::pair{viol, viol / std::max(std::fabs(before), 1e-300)};
    });

    return out;
}

void write_reports_jsonl(const std::vector<OracleReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write oracle reports: " + path);
    for (const OracleReport& r : reports) out << r.to_json() << "\n";
}

}  // namespace crossfield

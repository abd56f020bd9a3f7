#pragma once

#include <cmath>
#include <vector>

#include "crossfield/grid.hpp"

namespace crossfield {

// N x N real samples on a PeriodicGrid. Storage is x-fastest: at(i,j) =
// values[j*N + i]. Every public operation must leave the samples finite.
class ScalarField {
  public:
    explicit ScalarField(const PeriodicGrid& grid, double fill = 0.0)
        : grid_(grid), values_(std::size_t(grid.node_count()), fill) {}

    const PeriodicGrid& grid() const { return grid_; }

    double& at(int i, int j) { return values_[std::size_t(grid_.index(i, j))]; }
    double at(int i, int j) const { return values_[std::size_t(grid_.index(i, j))]; }

    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double sum() const {
        double s = 0.0;
        for (double v : values_) s += v;
        return s;
    }

  private:
    PeriodicGrid grid_;
    std::vector<double> values_;
};

// Grid-sampled 2-vector field; used for the representation field
// u ~ e^{i 4 theta} and the extended boundary data g. The `normalized` flag
// records that |u| = 1 (to 1e-12) at every node; operations that require a
// unit field check the flag rather than re-scanning.
class VectorField2 {
  public:
    explicit VectorField2(const PeriodicGrid& grid)
        : grid_(grid),
          u1_(std::size_t(grid.node_count()), 0.0),
          u2_(std::size_t(grid.node_count()), 0.0) {}

    const PeriodicGrid& grid() const { return grid_; }

    double& x(int i, int j) { return u1_[std::size_t(grid_.index(i, j))]; }
    double x(int i, int j) const { return u1_[std::size_t(grid_.index(i, j))]; }
    double& y(int i, int j) { return u2_[std::size_t(grid_.index(i, j))]; }
    double y(int i, int j) const { return u2_[std::size_t(grid_.index(i, j))]; }

    Vec2 at(int i, int j) const { return {x(i, j), y(i, j)}; }
    void set(int i, int j, const Vec2& v) {
        x(i, j) = v.x;
        y(i, j) = v.y;
    }

    std::vector<double>& comp1() { return u1_; }
    const std::vector<double>& comp1() const { return u1_; }
    std::vector<double>& comp2() { return u2_; }
    const std::vector<double>& comp2() const { return u2_; }

    bool normalized() const { return normalized_; }
    void set_normalized(bool f) { normalized_ = f; }

    // Cross angle theta(p) = atan2(u2,u1)/4, folded into [0, pi/2).
    double cross_angle(int i, int j) const {
        double t = std::atan2(y(i, j), x(i, j)) / 4.0;
        const double quarter = M_PI / 2.0;
        t = std::fmod(t, quarter);
        if (t < 0.0) t += quarter;
        return t;
    }

    bool all_finite() const {
        for (double v : u1_)
            if (!std::isfinite(v)) return false;
        for (double v : u2_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double max_norm_deviation() const {
        double worst = 0.0;
        for (std::size_t k = 0; k < u1_.size(); ++k) {
            double d = std::fabs(std::hypot(u1_[k], u2_[k]) - 1.0);
            if (d > worst) worst = d;
        }
        return worst;
    }

  private:
    PeriodicGrid grid_;
    std::vector<double> u1_;
    std::vector<double> u2_;
    bool normalized_ = false;
};

}  // namespace crossfield

#pragma once

#include <cmath>
#include <cstdint>

#include "crossfield/errors.hpp"

namespace crossfield {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
    Vec2 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
    }
    double angle() const { return std::atan2(y, x); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Square periodic node grid for the computational box [-L/2, L/2)^2.
// node(i,j) -> (-L/2 + i*h, -L/2 + j*h); indices wrap modulo N.
class PeriodicGrid {
  public:
    PeriodicGrid(int resolution, double side_length) : n_(resolution), length_(side_length) {
        if (n_ < 16 || n_ % 2 != 0)
            throw InvalidArgument("PeriodicGrid: resolution must be even and >= 16");
        if (!(length_ > 0.0)) throw InvalidArgument("PeriodicGrid: side length must be positive");
        h_ = length_ / n_;
    }

    int resolution() const { return n_; }
    double side_length() const { return length_; }
    double spacing() const { return h_; }
    double area() const { return length_ * length_; }
    std::int64_t node_count() const { return std::int64_t(n_) * n_; }

    int wrap(int i) const {
        int m = i % n_;
        return m < 0 ? m + n_ : m;
    }
    // Flat index, x-fastest: values[j*N + i].
    std::int64_t index(int i, int j) const {
        return std::int64_t(wrap(j)) * n_ + wrap(i);
    }

    double x(int i) const { return -0.5 * length_ + i * h_; }
    double y(int j) const { return -0.5 * length_ + j * h_; }
    Vec2 node(int i, int j) const { return {x(i), y(j)}; }

    // Continuous grid coordinate of a physical point (may fall outside [0,N)).
    double to_grid_x(double px) const { return (px + 0.5 * length_) / h_; }
    double to_grid_y(double py) const { return (py + 0.5 * length_) / h_; }

    bool operator==(const PeriodicGrid& o) const {
        return n_ == o.n_ && length_ == o.length_;
    }

  private:
    int n_;
    double length_;
    double h_;
};

}  // namespace crossfield

#pragma once
#include <cmath>
#include <cstddef>
#include <vector>

#include "nlkg/errors.hpp"

namespace nlkg {

// Uniform periodic grid on [-L, L). Value type; fields carry a copy.
struct Grid {
    int d = 1;       // spatial dimension (only d=1 is implemented)
    double L = 30.0; // half-width
    int N = 1024;    // number of points, even
    double h = 2.0 * 30.0 / 1024.0;

    Grid() = default;
    Grid(double half_width, int points, int dim = 1)
        : d(dim), L(half_width), N(points), h(2.0 * half_width / points) {
        if (dim != 1) throw ConfigError("Grid: only d=1 is implemented");
        if (points <= 0 || points % 2 != 0) throw ConfigError("Grid: N must be even and positive");
        if (half_width <= 0) throw ConfigError("Grid: L must be positive");
    }

    double x(int i) const { return -L + h * i; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.d == b.d && a.N == b.N && a.L == b.L;
    }
};

// Real scalar field sampled on a Grid.
struct Field {
    Grid grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), v(static_cast<std::size_t>(g.N), 0.0) {}

    template <class Fn>
    static Field from_function(const Grid& g, Fn f) {
        Field out(g);
        for (int i = 0; i < g.N; ++i) out.v[i] = f(g.x(i));
        return out;
    }

    int size() const { return grid.N; }
    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

    Field& operator+=(const Field& o) {
        for (int i = 0; i < size(); ++i) v[i] += o.v[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        for (int i = 0; i < size(); ++i) v[i] -= o.v[i];
        return *this;
    }
    Field& operator*=(double s) {
        for (double& a : v) a *= s;
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }

    bool all_finite() const {
        for (double a : v)
            if (!std::isfinite(a)) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (double a : v) m = std::max(m, std::abs(a));
        return m;
    }
};

// Periodic trapezoid rule, h * sum (spectrally accurate for smooth data).
inline double quadrature(const Field& f) {
    double s = 0.0;
    for (double a : f.v) s += a;
    return f.grid.h * s;
}

inline double dot_l2(const Field& a, const Field& b) {
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return a.grid.h * s;
}

inline double norm_l2(const Field& a) { return std::sqrt(dot_l2(a, a)); }

}  // namespace nlkg

#pragma once
#include <array>

#include "nlkg/fourier.hpp"
#include "nlkg/grid.hpp"
#include "nlkg/nonlinearity.hpp"

namespace nlkg {

// Element of the energy space H^1 x L^2: (u, u_t) as sampled fields.
struct State {
    Field first;   // H^1 slot
    Field second;  // L^2 slot

    State() = default;
    explicit State(const Grid& g) : first(g), second(g) {}
    State(Field a, Field b) : first(std::move(a)), second(std::move(b)) {}

    const Grid& grid() const { return first.grid; }

    State& operator+=(const State& o) {
        first += o.first;
        second += o.second;
        return *this;
    }
    State& operator-=(const State& o) {
        first -= o.first;
        second -= o.second;
        return *this;
    }
    State& operator*=(double s) {
        first *= s;
        second *= s;
        return *this;
    }
    friend State operator+(State a, const State& b) { return a += b; }
    friend State operator-(State a, const State& b) { return a -= b; }
    friend State operator*(double s, State a) { return a *= s; }

    bool all_finite() const { return first.all_finite() && second.all_finite(); }
};

// <x, y>_H = int grad x1 . grad y1 + x1 y1 + x2 y2
double inner_h(const State& x, const State& y);
double norm_h(const State& x);

// L^2 duality pairing <x | y> = int x1 y1 + x2 y2
double pair_l2(const State& x, const State& y);

// symplectic form omega(x, y) = int x2 y1 - x1 y2 = <Jx | y>
double omega(const State& x, const State& y);

// J (0 1; -1 0): J(x1, x2) = (x2, -x1)
State apply_J(const State& x);

// tau_q x = x(. - q), exact Fourier shift; preserves the H norm.
State translate(const State& x, double q);

// conserved energy and momentum of NLKG
double energy(const State& u, const Nonlinearity& n);
double momentum(const State& u);

// gradient states of a scalar field pair, d=1: (dx u1, dx u2)
State gradient(const State& u);

}  // namespace nlkg

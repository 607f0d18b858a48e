#include "nlkg/state.hpp"

#include <cmath>

namespace nlkg {

double inner_h(const State& x, const State& y) {
    const Field dx = derivative(x.first);
    const Field dy = derivative(y.first);
    return dot_l2(dx, dy) + dot_l2(x.first, y.first) + dot_l2(x.second, y.second);
}

double norm_h(const State& x) { return std::sqrt(inner_h(x, x)); }

double pair_l2(const State& x, const State& y) {
    return dot_l2(x.first, y.first) + dot_l2(x.second, y.second);
}

double omega(const State& x, const State& y) {
    return dot_l2(x.second, y.first) - dot_l2(x.first, y.second);
}

State apply_J(const State& x) { return State(x.second, -1.0 * x.first); }

State translate(const State& x, double q) {
    return State(translate(x.first, q), translate(x.second, q));
}

double energy(const State& u, const Nonlinearity& n) {
    const Field du = derivative(u.first);
    double s = 0.0;
    for (int i = 0; i < u.first.size(); ++i) {
        const double a = u.first[i];
        s += 0.5 * (u.second[i] * u.second[i] + du[i] * du[i] + a * a) - n.primitive(a);
    }
    return u.grid().h * s;
}

double momentum(const State& u) {
    const Field du = derivative(u.first);
    return dot_l2(u.second, du);
}

State gradient(const State& u) { return State(derivative(u.first), derivative(u.second)); }

}  // namespace nlkg

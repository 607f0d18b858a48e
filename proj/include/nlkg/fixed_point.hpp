#pragma once
#include <vector>

#include "nlkg/errors.hpp"

namespace nlkg {

// Banach fixed point in a complete quasi-distance space: with quasi-triangle
// constant C and contraction factor Lambda, iterate the m-fold composition of
// the map with C Lambda^m < 1. The iterates obey
//   d(x_k, x_j) <= Lambda^{m j} / (1 - C Lambda^m) * d(x_1, x_0)   (k > j).
template <class X>
struct QuasiBanachResult {
    X fixed;
    std::vector<double> step_dists;  // d(x_{n+1}, x_n)
    int outer_steps = 0;
    int block = 1;  // the m above
};

template <class X, class StepFn, class DistFn>
QuasiBanachResult<X> quasi_banach_fixed_point(X x0, StepFn step, DistFn dist, double c_quasi,
                                              double lambda, double tol, int max_outer = 200) {
    int m = 1;
    double pw = lambda;
    while (c_quasi * pw >= 1.0 && m < 64) {
        pw *= lambda;
        ++m;
    }
    if (c_quasi * pw >= 1.0) throw NoContraction("quasi_banach_fixed_point: C*Lambda^m >= 1");
    QuasiBanachResult<X> res{x0, {}, 0, m};
    for (int outer = 0; outer < max_outer; ++outer) {
        X y = res.fixed;
        for (int i = 0; i < m; ++i) y = step(y);
        const double d = dist(y, res.fixed);
        res.step_dists.push_back(d);
        res.fixed = y;
        ++res.outer_steps;
        if (d < tol) break;
    }
    return res;
}

}  // namespace nlkg

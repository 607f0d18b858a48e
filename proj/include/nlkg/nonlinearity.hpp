#pragma once
#include <cmath>
#include <vector>

#include "nlkg/errors.hpp"

namespace nlkg {

// Focusing power nonlinearity, possibly a sum of monomials:
//   f(a) = sum_k lambda_k |a|^{p_k - 1} a,   lambda_k >= 0, p_k >= 2.
// f(0) = f'(0) = 0 holds identically for this family.
struct Nonlinearity {
    struct Term {
        double p;
        double lambda;
    };
    std::vector<Term> terms;

    static Nonlinearity monomial(double p, double lambda = 1.0) {
        Nonlinearity n;
        n.add_term(p, lambda);
        return n;
    }

    void add_term(double p, double lambda) {
        if (p < 2.0) throw ConfigError("Nonlinearity: power must be >= 2");
        if (lambda < 0.0) throw ConfigError("Nonlinearity: coefficients must be >= 0");
        terms.push_back({p, lambda});
    }

    double f(double a) const {
        double s = 0.0;
        for (const Term& t : terms) s += t.lambda * std::pow(std::abs(a), t.p - 1.0) * a;
        return s;
    }

    double df(double a) const {
        double s = 0.0;
        for (const Term& t : terms) s += t.lambda * t.p * std::pow(std::abs(a), t.p - 1.0);
        return s;
    }

    double d2f(double a) const {
        double s = 0.0;
        for (const Term& t : terms) {
            if (a == 0.0) continue;
            s += t.lambda * t.p * (t.p - 1.0) * std::pow(std::abs(a), t.p - 2.0) * (a > 0 ? 1.0 : -1.0);
        }
        return s;
    }

    // primitive F(a) = int_0^a f
    double primitive(double a) const {
        double s = 0.0;
        for (const Term& t : terms) s += t.lambda * std::pow(std::abs(a), t.p + 1.0) / (t.p + 1.0);
        return s;
    }
};

}  // namespace nlkg

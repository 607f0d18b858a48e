#include "nlkg/soliton.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "nlkg/flow.hpp"
#include "nlkg/spectral.hpp"

namespace nlkg {

namespace {

Field symmetrize_even(const Field& f) {
    Field out(f.grid);
    const int n = f.size();
    for (int i = 0; i < n; ++i) out[i] = 0.5 * (f[i] + f[(n - i) % n]);
    return out;
}

Field static_residual(const Field& Q, const Nonlinearity& n) {
    Field r = laplacian(Q);
    for (int i = 0; i < Q.size(); ++i) r[i] = -r[i] + Q[i] - n.f(Q[i]);
    return r;
}

}  // namespace

double SolitonFamily::residual_inf() const { return static_residual(Q, nonlin).max_abs(); }

SolitonFamily ground_state(const Nonlinearity& n, const Grid& g) {
    if (n.terms.empty()) throw ConfigError("ground_state: nonlinearity has no terms");
    const double p = n.terms.front().p;
    const double lam = n.terms.front().lambda;
    // closed form for a single monomial; used as the Newton seed in general
    const double amp = std::pow(0.5 * (p + 1.0) / lam, 1.0 / (p - 1.0));
    const double expo = 2.0 / (p - 1.0);
    const double rate = 0.5 * (p - 1.0);
    Field Q = Field::from_function(g, [&](double x) {
        return amp * std::pow(1.0 / std::cosh(rate * x), expo);
    });
    Q = symmetrize_even(Q);

    const int n_pts = g.N;
    double res = static_residual(Q, n).max_abs();
    for (int iter = 0; iter < 50 && res > 1e-12; ++iter) {
        Eigen::MatrixXd J = assemble_Lplus_matrix(Q, n);
        // pin the odd (translation) direction so the solve stays well conditioned
        Field dq = derivative(Q);
        Eigen::VectorXd w(n_pts);
        for (int i = 0; i < n_pts; ++i) w(i) = dq[i];
        const double wn = w.norm();
        if (wn > 0) {
            w /= wn;
            J += w * w.transpose();
        }
        Field r = static_residual(Q, n);
        Eigen::VectorXd rhs(n_pts);
        for (int i = 0; i < n_pts; ++i) rhs(i) = r[i];
        Eigen::VectorXd delta = J.partialPivLu().solve(rhs);
        for (int i = 0; i < n_pts; ++i) Q[i] -= delta(i);
        Q = symmetrize_even(Q);
        res = static_residual(Q, n).max_abs();
    }
    if (res > 1e-10) throw NoConvergence("ground_state: Newton residual stalled at " + std::to_string(res));

    SolitonFamily fam;
    fam.Q = Q;
    fam.Qprime = derivative(Q);
    fam.Qsecond = derivative(fam.Qprime);
    fam.Qthird = derivative(fam.Qsecond);
    fam.fprimeQ = Field(g);
    for (int i = 0; i < n_pts; ++i) fam.fprimeQ[i] = n.df(Q[i]);
    fam.HQ = dot_l2(fam.Qprime, fam.Qprime);
    fam.static_energy = energy(State(Q, Field(g)), n);
    fam.nonlin = n;
    return fam;
}

State boost_soliton(const SolitonFamily& s, double p, double q) {
    const Grid& g = s.Q.grid;
    const double gamma = std::sqrt(1.0 + p * p);
    if (gamma > 4.0) throw UnderResolved("boost_soliton: <p> exceeds 4");
    // half width at half maximum of the unboosted profile
    const double q0 = s.Q[g.N / 2];
    double half_width = g.L;
    for (int i = g.N / 2; i < g.N; ++i) {
        if (s.Q[i] < 0.5 * q0) {
            half_width = g.x(i);
            break;
        }
    }
    if (half_width / gamma < 4.0 * g.h)
        throw UnderResolved("boost_soliton: contracted width below 4 grid spacings");

    const Spectrum sq = fft(s.Q);
    const Spectrum sqp = fft(s.Qprime);
    // Beyond the box the line profile is continued by its e^{-|y|} tail
    // rather than wrapped; a contracted argument can span several periods
    // and the wrapped tails would seam the sampled field at the boundary.
    auto eval_line = [&g](const Spectrum& spec, double y) {
        if (std::abs(y) <= g.L) return interp_value(spec, g, y);
        const double edge = interp_value(spec, g, y > 0 ? g.L : -g.L);
        return edge * std::exp(-(std::abs(y) - g.L));
    };
    State out(g);
    for (int i = 0; i < g.N; ++i) {
        const double y = gamma * (g.x(i) - q);
        out.first[i] = eval_line(sq, y);
        out.second[i] = p * eval_line(sqp, y);
    }
    return out;
}

double traveling_wave_residual(const SolitonFamily& s, double p, double T, double dt, int method) {
    const double gamma = std::sqrt(1.0 + p * p);
    State u = boost_soliton(s, p, 0.0);
    const State u0 = u;
    double worst = 0.0;
    const double sample_every = 0.25;
    double t = 0.0;
    double next_sample = sample_every;
    FullFlow flow(u, s.nonlin);
    while (t < T - 1e-12) {
        const double step = std::min(dt, T - t);
        flow.step(step, method);
        t += step;
        if (t >= next_sample - 1e-12 || t >= T - 1e-12) {
            next_sample += sample_every;
            const State target = translate(u0, -t * p / gamma);
            worst = std::max(worst, norm_h(flow.state() - target));
        }
    }
    return worst;
}

}  // namespace nlkg

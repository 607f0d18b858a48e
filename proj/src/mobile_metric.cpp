#include "nlkg/mobile_metric.hpp"

#include <cmath>
#include <functional>

namespace nlkg {

double phi(const MobileParams& p, double a) {
    const double c2 = p.C2;
    if (a <= c2) return 1.0;
    if (a >= 2.0 * c2) return a;
    const double s = (a - c2) / c2;  // Hermite: (c2,1,slope 0) -> (2c2,2c2,slope 1)
    const double h00 = 2 * s * s * s - 3 * s * s + 1;
    const double h01 = -2 * s * s * s + 3 * s * s;
    const double h11 = s * s * s - s * s;
    return h00 + 2.0 * c2 * h01 + c2 * h11;
}

double phi_delta(const MobileParams& p, double a) { return phi(p, a / p.delta); }

namespace {

double sq(double a) { return a * a; }

// Quadratic E-norm of  v^{1-j} - tau_q v^j  assembled in Fourier space; one
// inverse transform per evaluation (for the potential term), everything else
// is O(N) pairing against the precomputed frame spectra.
class DiffEngine {
  public:
    DiffEngine(const SpectralFrame& frame, const State& v0, const State& v1)
        : frame_(frame), g_(v0.grid()) {
        spec_[0] = {fft(v0.first), fft(v0.second)};
        spec_[1] = {fft(v1.first), fft(v1.second)};
    }

    double diff_e_norm_sq(double q, int j) const {
        const FramePairings& pr = frame_.pairings();
        const int nb = static_cast<int>(pr.y_spec.size());
        std::array<Spectrum, 2> d = spec_[1 - j];
        std::array<Spectrum, 2> shifted = spec_[j];
        translate_spectrum(g_, shifted[0], q);
        translate_spectrum(g_, shifted[1], q);
        for (int c = 0; c < 2; ++c)
            for (std::size_t m = 0; m < d[c].size(); ++m) d[c][m] -= shifted[c][m];

        // discrete coordinates from symplectic pairings
        const int K = frame_.K();
        Eigen::VectorXd coef(nb);
        auto omega_with = [&](int a) {
            return dot_l2_spec(g_, d[1], pr.y_spec[static_cast<std::size_t>(a)][0]) -
                   dot_l2_spec(g_, d[0], pr.y_spec[static_cast<std::size_t>(a)][1]);
        };
        for (int i = 0; i < K; ++i) {
            coef(2 * i) = omega_with(2 * i + 1);       // lambda_+ = omega(d, g_-)
            coef(2 * i + 1) = -omega_with(2 * i);      // lambda_- = -omega(d, g_+)
        }
        coef(2 * K) = omega_with(2 * K + 1) / frame_.HQ();   // mu
        coef(2 * K + 1) = -omega_with(2 * K) / frame_.HQ();  // nu

        // <L d | d>: Fourier-diagonal parts plus the physical potential term
        double quad = dot_l2_spec(g_, d[1], d[1]);
        {
            Spectrum w = d[0];
            for (int m = 0; m <= g_.N / 2; ++m) {
                const double xi = wavenumber(g_, m);
                w[static_cast<std::size_t>(m)] *= 1.0 + xi * xi;
            }
            quad += dot_l2_spec(g_, w, d[0]);
        }
        const Field d1 = ifft(g_, d[0]);
        const Field& fpq = frame_.family().fprimeQ;
        double pot = 0.0;
        for (int i = 0; i < g_.N; ++i) pot += fpq[i] * d1[i] * d1[i];
        quad -= g_.h * pot;

        // <L gamma | gamma> = <Ld|d> - 2 c.<Ld|y> + c.Gram.c
        double cross = 0.0;
        for (int a = 0; a < nb; ++a) {
            const double ldy = dot_l2_spec(g_, d[0], pr.Ly_spec[static_cast<std::size_t>(a)][0]) +
                               dot_l2_spec(g_, d[1], pr.Ly_spec[static_cast<std::size_t>(a)][1]);
            cross += coef(a) * ldy;
        }
        const double quad_gamma = quad - 2.0 * cross + coef.dot(pr.gramL * coef);

        double e2 = std::max(0.0, quad_gamma);
        for (int i = 0; i < K; ++i) e2 += sq(coef(2 * i)) + sq(coef(2 * i + 1));
        e2 += sq(coef(2 * K + 1)) + sq(frame_.kappa() * coef(2 * K));
        return e2;
    }

  private:
    const SpectralFrame& frame_;
    Grid g_;
    std::array<std::array<Spectrum, 2>, 2> spec_;
};

MobileResult mobile_core(const MobileParams& p, const SpectralFrame& frame, const State& v0,
                         const State& v1, const std::function<double(double)>& fare) {
    DiffEngine engine(frame, v0, v1);
    const double fare_w[2] = {fare(frame.energy_norm(v0)), fare(frame.energy_norm(v1))};

    auto objective = [&](double q, int j) {
        return engine.diff_e_norm_sq(q, j) + q * q * sq(fare_w[j]);
    };

    const double step = p.scan_step > 0 ? p.scan_step : v0.grid().h;

    double best = objective(0.0, 0);
    double best_q = 0.0;
    int best_j = 0;
    // no shift beyond sqrt(obj(0))/fare can beat staying put, so the scan
    // window shrinks accordingly (exact, not a heuristic)
    auto span_for = [&](int j) {
        const double width = std::min(p.scan_width, std::sqrt(best) / fare_w[j] + step);
        return std::max(1, static_cast<int>(std::floor(width / step)));
    };
    auto consider = [&](double obj, double q, int j) {
        const double eps = 1e-12 * (1.0 + best);
        if (obj < best - eps) {
            best = obj;
            best_q = q;
            best_j = j;
        } else if (obj < best + eps) {
            if (std::abs(q) < std::abs(best_q) - 1e-15 ||
                (std::abs(std::abs(q) - std::abs(best_q)) <= 1e-15 && j < best_j)) {
                best = std::min(best, obj);
                best_q = q;
                best_j = j;
            }
        }
    };
    for (int j = 0; j < 2; ++j) {
        const int span = span_for(j);
        for (int i = -span; i <= span; ++i) {
            if (i == 0) continue;  // q = 0 is the baseline `best`
            const double q = i * step;
            consider(objective(q, j), q, j);
        }
    }

    // golden-section refinement around the coarse minimum, both branches
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int j = 0; j < 2; ++j) {
        double a = best_q - step, b = best_q + step;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = objective(x1, j), f2 = objective(x2, j);
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = objective(x1, j);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = objective(x2, j);
            }
            if (std::abs(b - a) * (std::abs(f1) + std::abs(f2)) < p.refine_tol) break;
        }
        const double qr = f1 < f2 ? x1 : x2;
        consider(std::min(f1, f2), qr, j);
    }

    MobileResult res;
    res.value = std::sqrt(std::max(0.0, best));
    res.q = best_q;
    res.j = best_j;
    const double min_h = std::min(norm_h(v0), norm_h(v1));
    res.value_min_norm_variant =
        std::sqrt(std::max(0.0, engine.diff_e_norm_sq(best_q, best_j) + sq(best_q * fare(min_h))));
    return res;
}

}  // namespace

MobileResult mobile_dist(const MobileParams& p, const SpectralFrame& frame, const State& v0,
                         const State& v1) {
    return mobile_core(p, frame, v0, v1, [&p](double a) { return phi(p, a); });
}

double tilde_m(const MobileParams& p, const SpectralFrame& frame, const State& v0,
               const State& v1) {
    Coords cd = frame.decompose(v0 - v1);
    const double disc = frame.disc_norm_sq(cd);
    const State g0 = frame.project(v0, Proj::Gamma);
    const State g1 = frame.project(v1, Proj::Gamma);
    MobileResult m = mobile_core(p, frame, g0, g1, [&p](double a) { return phi_delta(p, a); });
    return std::sqrt(disc + m.value * m.value);
}

}  // namespace nlkg

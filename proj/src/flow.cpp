#include "nlkg/flow.hpp"

#include <cmath>
#include <sstream>

namespace nlkg {

std::vector<std::string> check_smallness(const FlowParams& p, const SpectralFrame& frame) {
    std::vector<std::string> out;
    const double kmin = frame.kmin(), kmax = frame.kmax(), kappa = frame.kappa();
    auto require = [&out](bool ok, const std::string& line) {
        if (!ok) out.push_back(line);
    };
    std::ostringstream s;
    auto fmt = [](double a) {
        std::ostringstream o;
        o << a;
        return o.str();
    };
    require(10.0 * (kmax * p.ell * p.ell + p.delta) <= kmin,
            "margin: kbar*ell^2 + delta = " + fmt(kmax * p.ell * p.ell + p.delta) +
                " not 10x below kmin = " + fmt(kmin));
    require(10.0 * p.delta <= p.ell * kmin,
            "margin: delta = " + fmt(p.delta) + " not 10x below ell*kmin = " + fmt(p.ell * kmin));
    require(10.0 * p.delta <= kmin * kmin,
            "margin: delta = " + fmt(p.delta) + " not 10x below kmin^2 = " + fmt(kmin * kmin));
    require(10.0 * p.C2 * p.delta <= 1.0,
            "margin: C2*delta = " + fmt(p.C2 * p.delta) + " not 10x below 1");
    require(10.0 * kappa <= kmin, "margin: kappa not 10x below kmin");
    return out;
}

double cutoff_chi(double t) {
    const double a = std::abs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double s = a - 1.0;
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double chi_delta(const FlowParams& p, double h_norm_sq) {
    return cutoff_chi(h_norm_sq / (p.delta * p.delta));
}

namespace {

struct FreeRotation {
    // per-mode cos(w t), sin(w t)/w, -w sin(w t) with w = sqrt(1 + xi^2)
    std::vector<double> c, s_over_w, neg_ws;
    FreeRotation(const Grid& g, double t) {
        const int nb = g.N / 2 + 1;
        c.resize(nb);
        s_over_w.resize(nb);
        neg_ws.resize(nb);
        for (int m = 0; m < nb; ++m) {
            const double xi = wavenumber(g, m);
            const double w = std::sqrt(1.0 + xi * xi);
            c[m] = std::cos(w * t);
            const double s = std::sin(w * t);
            s_over_w[m] = s / w;
            neg_ws[m] = -w * s;
        }
    }
    void apply(Spectrum& a, Spectrum& b) const {
        for (std::size_t m = 0; m < a.size(); ++m) {
            const std::complex<double> an = c[m] * a[m] + s_over_w[m] * b[m];
            b[m] = neg_ws[m] * a[m] + c[m] * b[m];
            a[m] = an;
        }
    }
};

constexpr double kYoshidaW1 = 1.3512071919596576;   // 1/(2 - 2^{1/3})
constexpr double kYoshidaW0 = -1.7024143839193153;  // 1 - 2 w1

void check_finite(const Field& f) {
    if (f.max_abs() > 1e6) throw NonFinite("field sample exceeded 1e6");
}

}  // namespace

FullFlow::FullFlow(const State& u0, const Nonlinearity& n)
    : grid_(u0.grid()), nonlin_(n), s1_(fft(u0.first)), s2_(fft(u0.second)), cache_(u0), cache_valid_(true) {}

void FullFlow::strang(double dt) {
    FreeRotation half(grid_, 0.5 * dt);
    half.apply(s1_, s2_);
    Field u1 = ifft(grid_, s1_);
    check_finite(u1);
    Field kick(grid_);
    for (int i = 0; i < grid_.N; ++i) kick[i] = nonlin_.f(u1[i]);
    Spectrum ks = fft(kick);
    for (std::size_t m = 0; m < s2_.size(); ++m) s2_[m] += dt * ks[m];
    half.apply(s1_, s2_);
}

void FullFlow::step(double dt, int method) {
    if (method == 4) {
        strang(kYoshidaW1 * dt);
        strang(kYoshidaW0 * dt);
        strang(kYoshidaW1 * dt);
    } else {
        strang(dt);
    }
    t_ += dt;
    cache_valid_ = false;
}

const State& FullFlow::state() const {
    if (!cache_valid_) {
        cache_ = State(ifft(grid_, s1_), ifft(grid_, s2_));
        cache_valid_ = true;
    }
    return cache_;
}

State nlkg_step(const State& u, const Nonlinearity& n, double dt, int method) {
    FullFlow f(u, n);
    f.step(dt, method);
    return f.state();
}

double A_of_v(const SpectralFrame& frame, const State& v) {
    const SolitonFamily& fam = frame.family();
    const double denom = frame.HQ() - dot_l2(fam.Qsecond, v.first);
    if (std::abs(denom) * 1e8 < frame.HQ())
        throw SingularModulationMatrix("modulation matrix condition exceeds 1e8");
    const double half_omega = dot_l2(v.second, derivative(v.first));  // omega(v, grad v)/2
    return half_omega / denom;
}

std::pair<State, double> localized_rhs(const ModState& ms, const FlowParams& p,
                                       const SpectralFrame& frame) {
    const SolitonFamily& fam = frame.family();
    const Grid& g = ms.w.grid();
    const Field Qc = translate(fam.Q, ms.c);
    const Field Qc1 = translate(fam.Qprime, ms.c);
    const Field Qc2 = translate(fam.Qsecond, ms.c);
    const Nonlinearity& n = fam.nonlin;

    const Field dw1 = derivative(ms.w.first);
    const double wnorm_sq = dot_l2(dw1, dw1) + dot_l2(ms.w.first, ms.w.first) +
                            dot_l2(ms.w.second, ms.w.second);
    const double chi = chi_delta(p, wnorm_sq);

    const double denom = frame.HQ() - dot_l2(Qc2, ms.w.first);
    if (std::abs(denom) * 1e8 < frame.HQ())
        throw SingularModulationMatrix("modulation matrix condition exceeds 1e8");
    const double Ac = dot_l2(ms.w.second, dw1) / denom;
    const double B = chi * Ac;

    State F(g);
    for (int i = 0; i < g.N; ++i) {
        const double q = Qc[i];
        const double w1 = ms.w.first[i];
        const double nc = n.f(q + w1) - n.f(q) - n.df(q) * w1;
        F.first[i] = B * Qc1[i];
        F.second[i] = n.df(q) * w1 + chi * nc;
    }
    return {F, B};
}

ModFlow::ModFlow(const State& w0, double c0, const FlowParams& p, const SpectralFrame& frame,
                 UPropOptions opts)
    : frame_(&frame), params_(p), opts_(opts), grid_(w0.grid()), c_(c0) {
    w_[0] = fft(w0.first);
    w_[1] = fft(w0.second);
}

std::pair<std::array<Spectrum, 2>, double> ModFlow::rhs(const std::array<Spectrum, 2>& what,
                                                        double c_stage, const Field& Qc,
                                                        const Field& Qc1, const Field& Qc2,
                                                        const Field& Qc3) const {
    const Nonlinearity& n = frame_->family().nonlin;
    const int N = grid_.N;
    const Field w1 = ifft(grid_, what[0]);
    const Field w2 = ifft(grid_, what[1]);
    Spectrum ds = what[0];
    for (int m = 0; m <= N / 2; ++m)
        ds[static_cast<std::size_t>(m)] *=
            (m == N / 2) ? 0.0 : std::complex<double>(0.0, wavenumber(grid_, m));
    const Field dw1 = ifft(grid_, ds);

    const double dc = c_stage - c_;  // Taylor shift of the frozen profiles
    double nrm = 0.0, aw = 0.0, q2w = 0.0;
    for (int i = 0; i < N; ++i) {
        nrm += dw1[i] * dw1[i] + w1[i] * w1[i] + w2[i] * w2[i];
        aw += w2[i] * dw1[i];
        q2w += (Qc2[i] - dc * Qc3[i]) * w1[i];
    }
    nrm *= grid_.h;
    aw *= grid_.h;
    q2w *= grid_.h;

    const double chi = opts_.unlocalized ? 1.0 : chi_delta(params_, nrm);
    const double denom = frame_->HQ() - q2w;
    if (std::abs(denom) * 1e8 < frame_->HQ())
        throw SingularModulationMatrix("modulation matrix condition exceeds 1e8");
    const double B = chi * (aw / denom);

    Field F1(grid_), F2(grid_);
    for (int i = 0; i < N; ++i) {
        const double q = Qc[i] - dc * Qc1[i];
        const double q1 = Qc1[i] - dc * Qc2[i];
        const double fpq = n.df(q);
        const double nc = n.f(q + w1[i]) - n.f(q) - fpq * w1[i];
        F1[i] = B * q1;
        F2[i] = fpq * w1[i] + chi * nc;
    }
    return {{fft(F1), fft(F2)}, B};
}

void ModFlow::step(double dt) {
    const SolitonFamily& fam = frame_->family();
    const Field Qc = translate(fam.Q, c_);
    const Field Qc1 = translate(fam.Qprime, c_);
    const Field Qc2 = translate(fam.Qsecond, c_);
    const Field Qc3 = translate(fam.Qthird, c_);

    const FreeRotation Eh(grid_, dt);
    const FreeRotation Eh2(grid_, 0.5 * dt);
    auto rot = [](const FreeRotation& r, std::array<Spectrum, 2> s) {
        r.apply(s[0], s[1]);
        return s;
    };
    auto axpy = [](std::array<Spectrum, 2> a, double t, const std::array<Spectrum, 2>& b) {
        for (int c = 0; c < 2; ++c)
            for (std::size_t m = 0; m < a[c].size(); ++m) a[c][m] += t * b[c][m];
        return a;
    };

    auto [F1, B1] = rhs(w_, c_, Qc, Qc1, Qc2, Qc3);
    const auto W2 = rot(Eh2, axpy(w_, 0.5 * dt, F1));
    auto [F2, B2] = rhs(W2, c_ + 0.5 * dt * B1, Qc, Qc1, Qc2, Qc3);
    const auto Ehalf_w = rot(Eh2, w_);
    const auto W3 = axpy(Ehalf_w, 0.5 * dt, F2);
    auto [F3, B3] = rhs(W3, c_ + 0.5 * dt * B2, Qc, Qc1, Qc2, Qc3);
    const auto W4 = axpy(rot(Eh, w_), dt, rot(Eh2, F3));
    auto [F4, B4] = rhs(W4, c_ + dt * B3, Qc, Qc1, Qc2, Qc3);

    std::array<Spectrum, 2> acc = rot(Eh, axpy(w_, dt / 6.0, F1));
    const auto mid = rot(Eh2, axpy(F2, 1.0, F3));
    acc = axpy(acc, dt / 3.0, mid);
    acc = axpy(acc, dt / 6.0, F4);
    w_ = acc;
    c_ += dt / 6.0 * (B1 + 2.0 * B2 + 2.0 * B3 + B4);
    t_ += dt;

    double peak = 0.0;
    for (const auto& z : w_[0]) peak = std::max(peak, std::abs(z));
    if (!std::isfinite(peak) || peak > 1e6 * grid_.N) throw NonFinite("modulated flow left the finite range");
}

State ModFlow::w() const { return State(ifft(grid_, w_[0]), ifft(grid_, w_[1])); }

State ModFlow::v() const {
    std::array<Spectrum, 2> s = w_;
    translate_spectrum(grid_, s[0], -c_);
    translate_spectrum(grid_, s[1], -c_);
    return State(ifft(grid_, s[0]), ifft(grid_, s[1]));
}

double ModFlow::w_h_norm_sq() const {
    const Grid& g = grid_;
    Spectrum ds = w_[0];
    for (int m = 0; m <= g.N / 2; ++m)
        ds[static_cast<std::size_t>(m)] *=
            (m == g.N / 2) ? 0.0 : std::complex<double>(0.0, wavenumber(g, m));
    return dot_l2_spec(g, ds, ds) + dot_l2_spec(g, w_[0], w_[0]) + dot_l2_spec(g, w_[1], w_[1]);
}

namespace {

State u_prop_fixed(const State& v0, double t, const FlowParams& p, const SpectralFrame& frame,
                   const UPropOptions& opts, double dt) {
    ModFlow flow(v0, 0.0, p, frame, opts);
    const double dir = t >= 0 ? 1.0 : -1.0;
    double remaining = std::abs(t);
    while (remaining > 1e-14) {
        const double step = std::min(dt, remaining);
        flow.step(dir * step);
        remaining -= step;
    }
    return flow.v();
}

}  // namespace

State u_prop(const State& v0, double t, const FlowParams& p, const SpectralFrame& frame,
             UPropOptions opts) {
    if (t == 0.0) return v0;
    double dt = p.dt;
    State result = u_prop_fixed(v0, t, p, frame, opts, dt);
    if (!opts.adaptive) return result;
    for (int pass = 0; pass < opts.max_halvings; ++pass) {
        dt *= 0.5;
        State refined = u_prop_fixed(v0, t, p, frame, opts, dt);
        const double gap = norm_h(refined - result);
        result = refined;
        if (gap < opts.adapt_tol) break;
    }
    return result;
}

std::vector<State> u_prop_samples(const State& v0, const std::vector<double>& ts,
                                  const FlowParams& p, const SpectralFrame& frame,
                                  UPropOptions opts) {
    std::vector<State> out;
    out.reserve(ts.size());
    ModFlow flow(v0, 0.0, p, frame, opts);
    double t = 0.0;
    for (double target : ts) {
        const double dir = target >= t ? 1.0 : -1.0;
        while (std::abs(target - t) > 1e-14) {
            const double step = std::min(p.dt, std::abs(target - t));
            flow.step(dir * step);
            t += dir * step;
        }
        out.push_back(flow.v());
    }
    return out;
}

double gamma_energy_drift(const std::vector<State>& traj, const SpectralFrame& frame) {
    if (traj.empty()) return 0.0;
    // gamma energy = <L gamma | gamma> plus the (negligible) discrete E-parts
    // left in the numerically projected gamma
    auto gamma_energy = [&frame](const State& v) {
        Coords c = frame.decompose(v);
        Coords cg = frame.decompose(c.gamma);
        return frame.disc_norm_sq(cg) + frame.quad_L(c.gamma);
    };
    const double base = gamma_energy(traj.front());
    double worst = 0.0;
    for (const State& s : traj) worst = std::max(worst, std::abs(gamma_energy(s) - base));
    return worst;
}

}  // namespace nlkg

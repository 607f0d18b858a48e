#pragma once
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nlkg/spectral.hpp"

namespace nlkg {

// Parameters of the localized modulated flow and its analysis windows.
struct FlowParams {
    double delta = 0.02;  // localization radius
    double ell = 0.1;     // graph Lipschitz constant
    double dt = 0.005;    // default time step
    int method = 4;       // splitting order for the full flow (2 = Strang, 4 = triple jump)
    double C0 = 2.0;      // exit threshold C0*delta
    double C1 = 12.0;     // linear-regime threshold C1*delta
    double C2 = 30.0;     // analysis window constant
};

// Smallness-condition audit; returns one human-readable line per violated
// factor-10 margin. Violations warn, they never abort.
std::vector<std::string> check_smallness(const FlowParams& p, const SpectralFrame& frame);

// C^2 bump: 1 on |t|<=1, 0 on |t|>=2, monotone quintic in between.
double cutoff_chi(double t);
double chi_delta(const FlowParams& p, double h_norm_sq);

// One step of the full NLKG by operator splitting (exact free half steps in
// Fourier, nonlinear kick in physical space). method 2 is Strang, method 4
// the triple-jump composition of Strang.
State nlkg_step(const State& u, const Nonlinearity& n, double dt, int method = 2);

// Full NLKG trajectory with Fourier-resident state between steps.
class FullFlow {
  public:
    FullFlow(const State& u0, const Nonlinearity& n);
    void step(double dt, int method = 2);
    const State& state() const;
    double time() const { return t_; }

  private:
    void strang(double dt);
    Grid grid_;
    Nonlinearity nonlin_;
    Spectrum s1_, s2_;
    double t_ = 0.0;
    mutable State cache_;
    mutable bool cache_valid_ = false;
};

// modulation vector field A(v) = (H(Q) - <Q''|v1>)^{-1} omega(v, grad v)/2
double A_of_v(const SpectralFrame& frame, const State& v);

// co-moving field plus translation parameter
struct ModState {
    State w;
    double c = 0.0;
};

// Right side of the modulated system beyond the free part:
//   w_t = J D w + F(w,c),  c_t = B(w,c)
// with F = (B grad Q_c, f'(Q_c) w1 + chi_delta(w) N_c(w)).
std::pair<State, double> localized_rhs(const ModState& ms, const FlowParams& p,
                                       const SpectralFrame& frame);

struct UPropOptions {
    bool adaptive = false;   // halve dt until successive answers agree to adapt_tol
    double adapt_tol = 1e-8;
    int max_halvings = 3;
    bool unlocalized = false;  // force chi == 1 (for conservation checks)
};

// Integrator for the (w,c) system: integrating-factor RK4 with the exact
// free Klein-Gordon propagator absorbed into the stages, so the stiff part
// carries no step-size restriction.
class ModFlow {
  public:
    ModFlow(const State& w0, double c0, const FlowParams& p, const SpectralFrame& frame,
            UPropOptions opts = {});
    void step(double dt);
    double c() const { return c_; }
    double time() const { return t_; }
    State w() const;
    State v() const;  // w(., x + c)
    double w_h_norm_sq() const;

  private:
    std::pair<std::array<Spectrum, 2>, double> rhs(const std::array<Spectrum, 2>& what, double c_stage,
                                                   const Field& Qc, const Field& Qc1, const Field& Qc2,
                                                   const Field& Qc3) const;
    const SpectralFrame* frame_;
    FlowParams params_;
    UPropOptions opts_;
    Grid grid_;
    std::array<Spectrum, 2> w_;
    double c_ = 0.0, t_ = 0.0;
};

// Nonlinear localized propagator U(t): integrates (w,c) from (v0, 0) and
// returns v(t) = w(t, x + c(t)). Sign of t is free.
State u_prop(const State& v0, double t, const FlowParams& p, const SpectralFrame& frame,
             UPropOptions opts = {});

// Trajectory sampler; ts must be sorted by |t| with one sign.
std::vector<State> u_prop_samples(const State& v0, const std::vector<double>& ts,
                                  const FlowParams& p, const SpectralFrame& frame,
                                  UPropOptions opts = {});

// max_t | <L gamma(t)|gamma(t)> + discrete E-parts  -  value at t=0 |
// evaluated on the gamma projection of each trajectory sample.
double gamma_energy_drift(const std::vector<State>& traj, const SpectralFrame& frame);

}  // namespace nlkg

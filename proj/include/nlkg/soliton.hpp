#pragma once
#include "nlkg/state.hpp"

namespace nlkg {

// Stationary profile Q of  -Q'' + Q = f(Q)  together with the derived
// quantities used throughout: derivatives, f'(Q), the kinetic matrix
// H(Q) = <Q'|Q'> (a scalar for d=1) and the static energy E(Q, 0).
struct SolitonFamily {
    Field Q;
    Field Qprime;
    Field Qsecond;
    Field Qthird;
    Field fprimeQ;
    double HQ = 0.0;
    double static_energy = 0.0;  // E of (Q, 0)
    Nonlinearity nonlin;

    State vec_Q() const { return State(Q, Field(Q.grid)); }
    State grad_vec_Q() const { return State(Qprime, Field(Q.grid)); }

    // static residual -Lap Q + Q - f(Q), sup norm
    double residual_inf() const;
};

// Ground state by Newton iteration on the discretized static equation,
// seeded with the closed-form monomial profile
//   ((p+1)/2)^{1/(p-1)} sech^{2/(p-1)}( (p-1)/2 x ).
// Evenness is enforced by symmetrization each step, which removes the
// translation zero mode from the Newton system.
SolitonFamily ground_state(const Nonlinearity& n, const Grid& g);

// Lorentz boost with momentum parameter p and position q:
//   first  slot:  Q(<p>(x - q)),        <p> = sqrt(1 + p^2)
//   second slot:  p Q'(<p>(x - q))
// so that E(boost(p,0)) = <p> E(Q) and P(boost(p,0)) = E(Q) p.
// Profiles are evaluated by trigonometric interpolation at the contracted
// argument. Throws UnderResolved when the contracted width drops below
// four grid spacings (or <p> > 4).
State boost_soliton(const SolitonFamily& s, double p, double q);

// Integrates NLKG from boost(p, 0) over [0, T] and returns
//   sup_t || u(t) - boost(p, q(t)) ||_H,  q(t) = -t p/<p>.
double traveling_wave_residual(const SolitonFamily& s, double p, double T,
                               double dt = 0.002, int method = 4);

}  // namespace nlkg

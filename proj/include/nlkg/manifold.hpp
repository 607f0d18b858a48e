#pragma once
#include <functional>
#include <string>

#include "nlkg/flow.hpp"
#include "nlkg/mobile_metric.hpp"

namespace nlkg {

// A center-(un)stable graph: stable-mode coefficients (on the g_k- basis)
// as a function of the rest of the state.
using GraphFn = std::function<Eigen::VectorXd(const State&)>;

GraphFn zero_graph(int K);

// Sampled graph with Lipschitz metadata.
struct GraphTable {
    std::vector<State> psi;             // inputs with P_- psi = 0
    std::vector<Eigen::VectorXd> value; // coefficients on g_k-
    double ell = 0.1;
    double delta = 0.02;
    std::string tag = "cs";
};

// Inverse-m~-distance blending over the nearest samples; exact at nodes.
GraphFn interpolate_graph(const GraphTable& table, const SpectralFrame& frame,
                          const MobileParams& mp);

// stable-coefficient state  sum_i a_i g_i-
State minus_state(const SpectralFrame& frame, const Eigen::VectorXd& a);

struct GstarOptions {
    double Tmax = 12.0;  // backward confinement horizon
    double tol = 1e-8;   // bisection width
};

// Center-unstable graph value at psi (P_- psi = 0) by backward-shooting
// bisection: the unique stable coefficient whose backward trajectory stays
// within C0*delta up to -Tmax. The bisection bracket is the Lipschitz-class
// bound +- ell |psi|_E, doubled once on failure.
Eigen::VectorXd eval_Gstar(const State& psi, const FlowParams& p, const SpectralFrame& frame,
                           const GstarOptions& opt = {});

struct TransformOptions {
    double inner_tol = 1e-11;  // residual tolerance of the preimage solve
    int max_evals = 200;
};

// One graph-transform step: for each node solve for the stable coefficient a
// with U(-T)(psi + a g-) on gr(G) (root of the backward membership map);
// the forward image of that point is psi + a g-, so a is the new value.
std::vector<Eigen::VectorXd> graph_transform_step(const GraphFn& G, const std::vector<State>& nodes,
                                                  double T, const FlowParams& p,
                                                  const SpectralFrame& frame,
                                                  const TransformOptions& opt = {});

// Empirical contraction factor of the graph transform between two graphs,
// measured in the sup of |G(psi)|_E / |psi|_E over the node set. Returns 0
// when the input graphs already agree.
double contraction_rate(const GraphFn& G0, const GraphFn& G1, const std::vector<State>& nodes,
                        double T, const FlowParams& p, const SpectralFrame& frame,
                        const TransformOptions& opt = {});

struct UnstableOptions {
    double floor = 1e-13;  // seed underflow floor
    double target_tol = 1e-6;
    bool validate_decay = true;  // re-integrate backward and check the rate
};

// Point of the unstable graph with prescribed unstable coefficients, by
// backward seeding e^{-kT} lambda g+ and forward integration, with secant
// correction of the seed amplitude.
State eval_unstable_graph(const Eigen::VectorXd& lam_plus, const FlowParams& p,
                          const SpectralFrame& frame, const UnstableOptions& opt = {});

struct RestrictResult {
    double nu = 0.0;
    State point;
    int iterations = 0;
    double residual_momentum = 0.0;  // omega(v, grad Q) + omega(v, grad v)/2
    double residual_jgrad = 0.0;     // omega(v, J grad Q)
};

// Orthogonality restriction: Picard iteration of
//   N(nu) = H(Q)^{-1} omega(phi(nu), grad phi(nu))/2,
//   phi(nu) = psi + nu J grad Q + G(psi + nu J grad Q),
// to its fixed point. psi must satisfy psi = P_{gamma+} psi, |psi| < delta.
RestrictResult restrict_orthogonal(const GraphFn& G, const State& psi, const FlowParams& p,
                                   const SpectralFrame& frame);

struct Trajectory {
    std::vector<double> t;
    std::vector<double> c;
    std::vector<State> v;
    std::vector<State> u;  // Q(.-c) + v(.-c)
};

// Solution of the original equation from manifold data: co-integrates the
// modulated field and c' = A(v), and assembles u = Q_c + w.
Trajectory reconstruct_solution(const State& v0, double c0, double t_end, const FlowParams& p,
                                const SpectralFrame& frame, double sample_dt = 0.25);

// Re-integrates u(0) with the full NLKG splitting and returns the largest
// H-distance to the reconstructed trajectory at its sample times.
double verify_reconstruction(const Trajectory& traj, const Nonlinearity& n, double dt = 0.002,
                             int method = 4);

struct ExitRecord {
    bool trapped = false;
    double t_exit = 0.0;
    double sup_v = 0.0;  // sup_t |v(t)|_H until exit/horizon
    double eta = 0.0;
    int sign = 1;
};

struct TrapOptions {
    double Tmax = 50.0;
    bool use_modulated = false;  // integrate in modulated variables instead of raw NLKG
    double dt = 0.005;
    int method = 4;
};

// Dichotomy experiment around a center-unstable manifold point phi_cu:
// time-reflects it to the center-stable side, perturbs by sign*eta*R(g-)
// transversally, evolves forward, and records the first time |v(t)|_H
// exceeds C0*delta (or Trapped at the horizon).
ExitRecord trapping_experiment(const State& phi_cu, double eta, int sign, const FlowParams& p,
                               const SpectralFrame& frame, const TrapOptions& opt = {});

struct EnergyExpansion {
    double residual = 0.0;    // defect of the exact quadratic-plus-remainder split
    double functional = 0.0;  // sum (k/2)(l+^2 + l-^2) + <L gamma|gamma>/2 - C(v)
    double cubic_remainder = 0.0;  // C(v)
};

// Expansion of the conserved energy at u = Q + v (c = 0):
//   E(Q+v) - E(Q) = -sum_k k l_k+ l_k- + <L gamma|gamma>/2 - C(v)   (mu = nu = 0)
// with C(v) the integrated Taylor remainder of the primitive of f.
EnergyExpansion energy_expansion_check(const State& v, const SpectralFrame& frame);

}  // namespace nlkg

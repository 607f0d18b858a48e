#pragma once
#include <Eigen/Dense>

#include <array>
#include <vector>

#include "nlkg/soliton.hpp"
#include "nlkg/state.hpp"

namespace nlkg {

// Dense matrix of L+ = -Delta + 1 - f'(Q) (spectral Laplacian as a symmetric
// circulant plus a diagonal potential).
Eigen::MatrixXd assemble_Lplus_matrix(const Field& Q, const Nonlinearity& n);

// Symplectic spectral coordinates of a state:
//   v = sum_k (lambda_k+ g_k+ + lambda_k- g_k-) + mu grad Q + nu J grad Q + gamma.
struct Coords {
    Eigen::VectorXd lambda_plus;
    Eigen::VectorXd lambda_minus;
    double mu = 0.0;
    double nu = 0.0;
    State gamma;
};

enum class Proj {
    Plus,       // unstable modes sum lambda_k+ g_k+
    Minus,      // stable modes
    Zero,       // translation block mu grad Q + nu J grad Q
    Disc,       // Plus + Minus + Zero
    Gamma,      // continuous-spectrum remainder
    GeqZero,    // I - Minus
    LeqZero,    // I - Plus
    GammaPlus,  // Gamma + Plus
    ZeroPlus,   // Zero + Plus
    ZeroMinus,  // Zero + Minus
};

struct FrameOptions {
    double tol_neg = 1e-6;          // eigenvalues below -tol_neg count as negative
    double kernel_window = 1e-5;    // |lambda| below this is the kernel
    double kernel_angle_tol = 1e-4; // max angle between kernel vector and Q'
    double kappa_ratio = 0.01;      // kappa = ratio * kmin
};

// Pre-paired frame data for fast energy norms of differences (used by the
// translation scans of the mobile distance).
struct FramePairings {
    std::vector<std::array<Spectrum, 2>> y_spec;   // basis states, both slots
    std::vector<std::array<Spectrum, 2>> Ly_spec;  // L applied to basis states
    Eigen::MatrixXd gramL;                         // <L y_a | y_b>
};

// Everything derived from the linearized operator at Q: the discrete
// eigenpairs, the symplectic frame {g_k+-, grad Q, J grad Q}, the projections,
// the energy norm, and the exact linearized propagator e^{JLt} (computed in
// the full L+ eigenbasis, so quadratic invariants are conserved to rounding).
class SpectralFrame {
  public:
    SpectralFrame(const SolitonFamily& fam, const FrameOptions& opt = {});

    int K() const { return static_cast<int>(k_.size()); }
    const std::vector<double>& klist() const { return k_; }
    double kmin() const { return kmin_; }
    double kmax() const { return kmax_; }
    double kappa() const { return kappa_; }
    double HQ() const { return HQ_; }
    double kernel_eigenvalue() const { return kernel_eval_; }
    double kernel_angle() const { return kernel_angle_; }
    const Field& rho(int i) const { return rho_[static_cast<std::size_t>(i)]; }
    const State& g_plus(int i) const { return g_plus_[static_cast<std::size_t>(i)]; }
    const State& g_minus(int i) const { return g_minus_[static_cast<std::size_t>(i)]; }
    const State& grad_Q() const { return grad_Q_; }
    const State& J_grad_Q() const { return J_grad_Q_; }
    const SolitonFamily& family() const { return fam_; }
    const Grid& grid() const { return grad_Q_.grid(); }
    const FramePairings& pairings() const { return pairings_; }

    Coords decompose(const State& v) const;
    State reconstruct(const Coords& c) const;
    State discrete_part(const Coords& c) const;
    State project(const State& v, Proj which) const;

    // sqrt( sum |lambda_k|^2 + nu^2 + kappa^2 mu^2 + <L gamma | gamma> );
    // throws NegativeQuadraticForm when the gamma form dips below -1e-9.
    double energy_norm(const State& v) const;
    double energy_norm_sq(const State& v) const;
    // E-norm restricted to the discrete coordinates
    double disc_norm_sq(const Coords& c) const;

    Field apply_Lplus(const Field& x) const;
    double quad_L(const State& x) const;  // <L x | x>

    // exact discrete propagator of v_t = J L v
    State linear_prop(const State& v, double t) const;

    // all L+ eigenvalues (ascending) of the discretization
    const Eigen::VectorXd& spectrum() const { return evals_; }

  private:
    SolitonFamily fam_;
    std::vector<double> k_;
    std::vector<Field> rho_;
    std::vector<State> g_plus_, g_minus_;
    State grad_Q_, J_grad_Q_;
    double HQ_ = 0.0, kmin_ = 0.0, kmax_ = 0.0, kappa_ = 0.0, kernel_eval_ = 0.0,
           kernel_angle_ = 0.0;
    Eigen::VectorXd evals_;
    Eigen::MatrixXd evecs_;  // Euclidean-orthonormal columns
    FramePairings pairings_;

    const State& basis(int a) const;
    int basis_count() const { return 2 * K() + 2; }
    Eigen::VectorXd basis_coeffs(const Coords& c) const;
};

}  // namespace nlkg

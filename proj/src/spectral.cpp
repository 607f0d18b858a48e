#include "nlkg/spectral.hpp"

#include <cmath>

namespace nlkg {

Eigen::MatrixXd assemble_Lplus_matrix(const Field& Q, const Nonlinearity& n) {
    const Grid& g = Q.grid;
    const int N = g.N;
    // second-derivative circulant from the inverse transform of -xi^2
    Spectrum mult(static_cast<std::size_t>(N / 2 + 1));
    for (int m = 0; m <= N / 2; ++m) {
        const double xi = wavenumber(g, m);
        mult[static_cast<std::size_t>(m)] = -xi * xi;
    }
    Field stencil = ifft(g, mult);
    // enforce exact evenness of the stencil so the matrix is symmetric
    for (int m = 1; m < N / 2; ++m) {
        const double avg = 0.5 * (stencil[m] + stencil[N - m]);
        stencil[m] = avg;
        stencil[N - m] = avg;
    }
    Eigen::MatrixXd A(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) A(i, j) = -stencil[(i - j + N) % N];
    for (int i = 0; i < N; ++i) A(i, i) += 1.0 - n.df(Q[i]);
    return A;
}

namespace {

// deterministic sign: rho(0) >= 0, or rho'(0) > 0 for odd modes
void fix_sign(Field& rho) {
    const int mid = rho.grid.N / 2;  // x = 0
    if (std::abs(rho[mid]) > 1e-8 * rho.max_abs()) {
        if (rho[mid] < 0) rho *= -1.0;
    } else if (rho[mid + 1] - rho[mid - 1] < 0) {
        rho *= -1.0;
    }
}

}  // namespace

SpectralFrame::SpectralFrame(const SolitonFamily& fam, const FrameOptions& opt) : fam_(fam) {
    const Grid& g = fam.Q.grid;
    const int N = g.N;
    const double sqrt_h = std::sqrt(g.h);

    Eigen::MatrixXd A = assemble_Lplus_matrix(fam.Q, fam.nonlin);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
    evals_ = solver.eigenvalues();
    evecs_ = solver.eigenvectors();

    grad_Q_ = State(fam.Qprime, Field(g));
    J_grad_Q_ = apply_J(grad_Q_);
    HQ_ = fam.HQ;

    // classify: kernel window first, then negatives
    Field qn = fam.Qprime;
    qn *= 1.0 / norm_l2(qn);
    int kernel_count = 0;
    for (int j = 0; j < N; ++j) {
        const double lam = evals_(j);
        if (std::abs(lam) < opt.kernel_window) {
            ++kernel_count;
            kernel_eval_ = lam;
            Field e(g);
            for (int i = 0; i < N; ++i) e[i] = evecs_(i, j) / sqrt_h;
            const double c = std::abs(dot_l2(e, qn));  // |cos angle|, both unit
            kernel_angle_ = std::acos(std::min(1.0, c));
            if (kernel_angle_ > opt.kernel_angle_tol)
                throw KernelMismatch("near-zero eigenfunction is not parallel to grad Q");
        } else if (lam < -opt.tol_neg) {
            const double k = std::sqrt(-lam);
            Field rho(g);
            for (int i = 0; i < N; ++i) rho[i] = evecs_(i, j) / sqrt_h;
            fix_sign(rho);
            k_.push_back(k);
            rho_.push_back(rho);
            Field up = rho, down = rho;
            up *= k / std::sqrt(2.0 * k);
            down *= -k / std::sqrt(2.0 * k);
            Field top = rho;
            top *= 1.0 / std::sqrt(2.0 * k);
            g_plus_.push_back(State(top, up));
            g_minus_.push_back(State(top, down));
        }
    }
    if (kernel_count != g.d)
        throw KernelMismatch("expected exactly " + std::to_string(g.d) +
                             " kernel eigenvalue(s), found " + std::to_string(kernel_count));
    if (k_.empty()) throw KernelMismatch("no negative eigenvalue found");

    kmin_ = *std::min_element(k_.begin(), k_.end());
    kmax_ = *std::max_element(k_.begin(), k_.end());
    kappa_ = opt.kappa_ratio * kmin_;

    // pairing tables for fast difference norms
    const int nb = basis_count();
    pairings_.y_spec.resize(static_cast<std::size_t>(nb));
    pairings_.Ly_spec.resize(static_cast<std::size_t>(nb));
    pairings_.gramL.resize(nb, nb);
    std::vector<State> Ly(static_cast<std::size_t>(nb));
    for (int a = 0; a < nb; ++a) {
        const State& y = basis(a);
        pairings_.y_spec[static_cast<std::size_t>(a)] = {fft(y.first), fft(y.second)};
        Ly[static_cast<std::size_t>(a)] = State(apply_Lplus(y.first), y.second);
        pairings_.Ly_spec[static_cast<std::size_t>(a)] = {fft(Ly[static_cast<std::size_t>(a)].first),
                                                          fft(Ly[static_cast<std::size_t>(a)].second)};
    }
    for (int a = 0; a < nb; ++a)
        for (int b = 0; b < nb; ++b)
            pairings_.gramL(a, b) = pair_l2(Ly[static_cast<std::size_t>(a)], basis(b));
}

const State& SpectralFrame::basis(int a) const {
    const int K = this->K();
    if (a < 2 * K) return (a % 2 == 0) ? g_plus_[static_cast<std::size_t>(a / 2)] : g_minus_[static_cast<std::size_t>(a / 2)];
    return (a == 2 * K) ? grad_Q_ : J_grad_Q_;
}

Eigen::VectorXd SpectralFrame::basis_coeffs(const Coords& c) const {
    const int K = this->K();
    Eigen::VectorXd out(basis_count());
    for (int i = 0; i < K; ++i) {
        out(2 * i) = c.lambda_plus(i);
        out(2 * i + 1) = c.lambda_minus(i);
    }
    out(2 * K) = c.mu;
    out(2 * K + 1) = c.nu;
    return out;
}

Coords SpectralFrame::decompose(const State& v) const {
    const int K = this->K();
    Coords c;
    c.lambda_plus.resize(K);
    c.lambda_minus.resize(K);
    for (int i = 0; i < K; ++i) {
        c.lambda_plus(i) = omega(v, g_minus_[static_cast<std::size_t>(i)]);
        c.lambda_minus(i) = -omega(v, g_plus_[static_cast<std::size_t>(i)]);
    }
    c.mu = omega(v, J_grad_Q_) / HQ_;
    c.nu = -omega(v, grad_Q_) / HQ_;
    c.gamma = v - discrete_part(c);
    return c;
}

State SpectralFrame::discrete_part(const Coords& c) const {
    State out(grid());
    for (int i = 0; i < K(); ++i) {
        out += c.lambda_plus(i) * g_plus_[static_cast<std::size_t>(i)];
        out += c.lambda_minus(i) * g_minus_[static_cast<std::size_t>(i)];
    }
    out += c.mu * grad_Q_;
    out += c.nu * J_grad_Q_;
    return out;
}

State SpectralFrame::reconstruct(const Coords& c) const { return discrete_part(c) + c.gamma; }

State SpectralFrame::project(const State& v, Proj which) const {
    Coords c = decompose(v);
    State plus(grid()), minus(grid()), zero(grid());
    for (int i = 0; i < K(); ++i) {
        plus += c.lambda_plus(i) * g_plus_[static_cast<std::size_t>(i)];
        minus += c.lambda_minus(i) * g_minus_[static_cast<std::size_t>(i)];
    }
    zero += c.mu * grad_Q_;
    zero += c.nu * J_grad_Q_;
    switch (which) {
        case Proj::Plus: return plus;
        case Proj::Minus: return minus;
        case Proj::Zero: return zero;
        case Proj::Disc: return plus + minus + zero;
        case Proj::Gamma: return c.gamma;
        case Proj::GeqZero: return v - minus;
        case Proj::LeqZero: return v - plus;
        case Proj::GammaPlus: return c.gamma + plus;
        case Proj::ZeroPlus: return zero + plus;
        case Proj::ZeroMinus: return zero + minus;
    }
    throw ConfigError("project: bad selector");
}

Field SpectralFrame::apply_Lplus(const Field& x) const {
    Field out = laplacian(x);
    const Field& fpq = fam_.fprimeQ;
    for (int i = 0; i < x.size(); ++i) out[i] = -out[i] + x[i] - fpq[i] * x[i];
    return out;
}

double SpectralFrame::quad_L(const State& x) const {
    return dot_l2(apply_Lplus(x.first), x.first) + dot_l2(x.second, x.second);
}

double SpectralFrame::disc_norm_sq(const Coords& c) const {
    double s = 0.0;
    for (int i = 0; i < K(); ++i)
        s += c.lambda_plus(i) * c.lambda_plus(i) + c.lambda_minus(i) * c.lambda_minus(i);
    s += c.nu * c.nu + kappa_ * kappa_ * c.mu * c.mu;
    return s;
}

double SpectralFrame::energy_norm_sq(const State& v) const {
    Coords c = decompose(v);
    const double qg = quad_L(c.gamma);
    if (qg < -1e-9) throw NegativeQuadraticForm("<L gamma|gamma> = " + std::to_string(qg));
    return disc_norm_sq(c) + std::max(0.0, qg);
}

double SpectralFrame::energy_norm(const State& v) const { return std::sqrt(energy_norm_sq(v)); }

State SpectralFrame::linear_prop(const State& v, double t) const {
    const Grid& g = grid();
    const int N = g.N;
    const double sqrt_h = std::sqrt(g.h);
    Eigen::VectorXd u1(N), u2(N);
    for (int i = 0; i < N; ++i) {
        u1(i) = v.first[i];
        u2(i) = v.second[i];
    }
    // coefficients in the quadrature-orthonormal eigenbasis
    Eigen::VectorXd a = sqrt_h * (evecs_.transpose() * u1);
    Eigen::VectorXd b = sqrt_h * (evecs_.transpose() * u2);
    for (int j = 0; j < N; ++j) {
        const double lam = evals_(j);
        double an, bn;
        if (std::abs(lam) < 1e-9) {
            an = a(j) + t * b(j);
            bn = b(j);
        } else if (lam > 0) {
            const double w = std::sqrt(lam);
            an = a(j) * std::cos(w * t) + b(j) * std::sin(w * t) / w;
            bn = -a(j) * w * std::sin(w * t) + b(j) * std::cos(w * t);
        } else {
            const double k = std::sqrt(-lam);
            an = a(j) * std::cosh(k * t) + b(j) * std::sinh(k * t) / k;
            bn = a(j) * k * std::sinh(k * t) + b(j) * std::cosh(k * t);
        }
        a(j) = an;
        b(j) = bn;
    }
    Eigen::VectorXd w1 = (evecs_ * a) / sqrt_h;
    Eigen::VectorXd w2 = (evecs_ * b) / sqrt_h;
    State out(g);
    for (int i = 0; i < N; ++i) {
        out.first[i] = w1(i);
        out.second[i] = w2(i);
    }
    return out;
}

}  // namespace nlkg

#include "nlkg/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace nlkg {

namespace {

// FFTW planning is not thread safe; execution on distinct buffers is.
// One workspace (buffers + plans) per thread per transform size.
struct Workspace {
    int n = 0;
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    explicit Workspace(int n_) : n(n_) {
        static std::mutex planner_mutex;
        std::lock_guard<std::mutex> lock(planner_mutex);
        real = fftw_alloc_real(static_cast<std::size_t>(n));
        cplx = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
        fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
    }
    Workspace(const Workspace&) = delete;
    ~Workspace() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(cplx);
    }
};

Workspace& workspace(int n) {
    thread_local std::map<int, Workspace> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(std::piecewise_construct, std::forward_as_tuple(n), std::forward_as_tuple(n)).first;
    return it->second;
}

}  // namespace

double wavenumber(const Grid& g, int m) { return M_PI * m / g.L; }

Spectrum fft(const Field& f) {
    const int n = f.grid.N;
    Workspace& ws = workspace(n);
    for (int i = 0; i < n; ++i) ws.real[i] = f.v[static_cast<std::size_t>(i)];
    fftw_execute(ws.fwd);
    Spectrum out(static_cast<std::size_t>(n / 2 + 1));
    for (int m = 0; m <= n / 2; ++m) out[static_cast<std::size_t>(m)] = {ws.cplx[m][0], ws.cplx[m][1]};
    return out;
}

Field ifft(const Grid& g, const Spectrum& s) {
    const int n = g.N;
    Workspace& ws = workspace(n);
    for (int m = 0; m <= n / 2; ++m) {
        ws.cplx[m][0] = s[static_cast<std::size_t>(m)].real();
        ws.cplx[m][1] = s[static_cast<std::size_t>(m)].imag();
    }
    fftw_execute(ws.bwd);
    Field out(g);
    const double inv = 1.0 / n;
    for (int i = 0; i < n; ++i) out.v[static_cast<std::size_t>(i)] = ws.real[i] * inv;
    return out;
}

Field laplacian(const Field& f) {
    return apply_multiplier(f, [](double xi) { return -xi * xi; });
}

Field derivative(const Field& f) {
    Spectrum s = fft(f);
    const int n = f.grid.N;
    for (int m = 0; m <= n / 2; ++m) {
        if (m == n / 2) {
            s[static_cast<std::size_t>(m)] = 0.0;
        } else {
            s[static_cast<std::size_t>(m)] *= std::complex<double>(0.0, wavenumber(f.grid, m));
        }
    }
    return ifft(f.grid, s);
}

Field apply_D_power(const Field& f, double s) {
    if (s == 0.0) return f;
    return apply_multiplier(f, [s](double xi) { return std::pow(1.0 + xi * xi, 0.5 * s); });
}

void translate_spectrum(const Grid& g, Spectrum& s, double q) {
    const int n = g.N;
    for (int m = 0; m < n / 2; ++m) {
        const double phase = -wavenumber(g, m) * q;
        s[static_cast<std::size_t>(m)] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
    // Nyquist bin: keep the field real (cosine part of the shift).
    s[static_cast<std::size_t>(n / 2)] *= std::cos(wavenumber(g, n / 2) * q);
}

Field translate(const Field& f, double q) {
    if (q == 0.0) return f;
    Spectrum s = fft(f);
    translate_spectrum(f.grid, s, q);
    return ifft(f.grid, s);
}

double interp_value(const Spectrum& s, const Grid& g, double y) {
    const int n = g.N;
    // shift to the grid origin: modes are exp(i xi (x + L)) relative to index space,
    // but since bins are defined by samples at x_i = -L + i h, the series is
    // f(y) = (1/N) [ c0 + 2 sum Re(c_m e^{i xi_m (y+L)}) + c_{N/2} cos(xi_{N/2}(y+L)) ].
    const double z = y + g.L;
    double acc = s[0].real();
    for (int m = 1; m < n / 2; ++m) {
        const double th = wavenumber(g, m) * z;
        const std::complex<double> e(std::cos(th), std::sin(th));
        acc += 2.0 * (s[static_cast<std::size_t>(m)] * e).real();
    }
    acc += s[static_cast<std::size_t>(n / 2)].real() * std::cos(wavenumber(g, n / 2) * z);
    return acc / n;
}

double dot_l2_spec(const Grid& g, const Spectrum& a, const Spectrum& b) {
    const int n = g.N;
    double acc = a[0].real() * b[0].real();
    for (int m = 1; m < n / 2; ++m) {
        const std::size_t mm = static_cast<std::size_t>(m);
        acc += 2.0 * (a[mm].real() * b[mm].real() + a[mm].imag() * b[mm].imag());
    }
    acc += a[static_cast<std::size_t>(n / 2)].real() * b[static_cast<std::size_t>(n / 2)].real();
    return g.h * acc / n;
}

}  // namespace nlkg

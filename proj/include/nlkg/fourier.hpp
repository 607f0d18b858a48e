#pragma once
#include <complex>
#include <vector>

#include "nlkg/grid.hpp"

namespace nlkg {

// Discrete spectrum of a real field: r2c layout, bins m = 0 .. N/2.
// Wavenumber of bin m is xi_m = pi*m/L (period 2L).
using Spectrum = std::vector<std::complex<double>>;

double wavenumber(const Grid& g, int m);

Spectrum fft(const Field& f);
Field ifft(const Grid& g, const Spectrum& s);

// Applies a real Fourier multiplier m(xi).
template <class Fn>
Field apply_multiplier(const Field& f, Fn mult) {
    Spectrum s = fft(f);
    for (std::size_t m = 0; m < s.size(); ++m) s[m] *= mult(wavenumber(f.grid, static_cast<int>(m)));
    return ifft(f.grid, s);
}

// Spectral second derivative.
Field laplacian(const Field& f);

// First derivative; Nyquist mode is dropped (odd multiplier convention).
Field derivative(const Field& f);

// (1 - Delta)^{s/2} as a Fourier multiplier (1+xi^2)^{s/2}.
Field apply_D_power(const Field& f, double s);

// Spatial shift f(. - q) by Fourier phase, exact on resolved modes.
// The Nyquist bin is multiplied by cos(xi q) to keep the result real.
Field translate(const Field& f, double q);
void translate_spectrum(const Grid& g, Spectrum& s, double q);

// Trigonometric (Fourier) interpolation of f at an arbitrary point y.
double interp_value(const Spectrum& s, const Grid& g, double y);

// Parseval pairing h*sum(a*b) evaluated from spectra.
double dot_l2_spec(const Grid& g, const Spectrum& a, const Spectrum& b);

}  // namespace nlkg

#pragma once
#include "nlkg/spectral.hpp"

namespace nlkg {

// Cutoff weight for the translation fare. phi is 1 below the knee C2, the
// identity beyond 2*C2, and a monotone C^1 cubic in between. Note the two
// flats force a mean slope near 2 on the transition (a slope cap of 1 there
// is not attainable), and the doubling bound phi(b) <= 4 phi(a) for a <= 2b
// requires C2 <= 2; the default keeps a margin.
struct MobileParams {
    double delta = 0.02;
    double C2 = 1.5;          // knee of phi
    double scan_width = 15.0; // max |q| of the coarse shift scan
    double scan_step = 0.0;   // 0 -> one grid spacing
    double refine_tol = 1e-10;
};

double phi(const MobileParams& p, double a);
double phi_delta(const MobileParams& p, double a);  // phi(a/delta)

struct MobileResult {
    double value = 0.0;  // m_phi(v0, v1)
    double q = 0.0;      // minimizing shift
    int j = 0;           // which argument was shifted
    // diagnostics: the minimized objective with the alternative fare weight
    // phi(min(|v0|_H, |v1|_H)) in place of phi(|v^j|_E)
    double value_min_norm_variant = 0.0;
};

// Translation-tolerant quasi-distance
//   m_phi(v0, v1)^2 = inf_{q, j} |v^{1-j} - v^j(. - q)|_E^2 + q^2 phi(|v^j|_E)^2
// minimized by a coarse scan over shifts (one grid spacing apart) followed by
// golden-section refinement. Ties break toward smaller |q|, then j = 0.
MobileResult mobile_dist(const MobileParams& p, const SpectralFrame& frame, const State& v0,
                         const State& v1);

// Composite quasi-distance: discrete gap in E plus the mobile distance of the
// continuous-spectrum parts with the delta-scaled fare,
//   m~(v0,v1)^2 = |P_d(v0-v1)|_E^2 + m_{phi_delta}(P_gamma v0, P_gamma v1)^2.
double tilde_m(const MobileParams& p, const SpectralFrame& frame, const State& v0, const State& v1);

}  // namespace nlkg

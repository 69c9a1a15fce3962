#pragma once

#include <cmath>
#include <complex>

// Test-only transcription of the transmission formulas in raw SI units,
// evaluated directly in omega with long double.  Shares nothing with the
// library's window-offset formulation.
namespace literal {

using real = long double;
using cplx = std::complex<long double>;

struct Inputs {
    real M1, omega_chi, gamma1, hbar, G_om, abar, kappa, eta_c, delta_bar, r, phi;
};

inline cplx chi(const Inputs& in, real omega) {
    return real(1) / (in.M1 * cplx(in.omega_chi * in.omega_chi - omega * omega, -omega * in.gamma1));
}

inline cplx f(const Inputs& in, real omega) {
    const cplx i(0, 1);
    return in.hbar * in.G_om * in.G_om * in.abar * in.abar * chi(in, omega) /
           (i * (in.delta_bar - omega) + in.kappa / 2);
}

inline cplx transmission(const Inputs& in, real omega) {
    const cplx i(0, 1);
    const cplx fv = f(in, omega);
    const cplx denom = -i * (in.delta_bar + omega) + in.kappa / 2 + real(2) * in.delta_bar * fv;
    const cplx drive = std::polar(in.r, in.phi) * (real(2) / in.kappa) * (i * in.delta_bar - i * omega + in.kappa / 2);
    const cplx numer = real(1) + i * fv * (real(1) + drive);
    return real(1) - numer * in.eta_c * in.kappa / denom;
}

} // namespace literal

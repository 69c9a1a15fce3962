#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "gravomit/error.hpp"
#include "gravomit/params.hpp"
#include "gravomit/response.hpp"

namespace gravomit {

struct StationarySolution {
    double x_bar_1 = 0.0;            // m
    std::complex<double> a_bar;      // sqrt(photons)
    double delta_bar = 0.0;          // rad/s
    int iterations = 0;
};

// Self-consistent operating point for a pump of amplitude alpha_l (sqrt(photons/s)),
// phase phi_l and bare detuning delta = omega_l - omega_c.
inline StationarySolution stationary_solution(double alpha_l, double phi_l, double delta, const SystemParams& p,
                                              double omega1_prime) {
    const double kappa = p.cavity.kappa;
    if (!(kappa > 0.0)) {
        throw DomainError("stationary_solution needs kappa > 0");
    }
    const double G = p.cavity.G_om;
    const std::complex<double> source = std::sqrt(p.cavity.eta_c * kappa) * std::polar(alpha_l, -phi_l);
    const double stiffness = p.mechanics.M1 * omega1_prime * omega1_prime;

    StationarySolution s;
    s.delta_bar = delta;
    constexpr int max_iterations = 1000;
    for (int k = 1; k <= max_iterations; ++k) {
        s.a_bar = source / std::complex<double>(kappa / 2.0, -s.delta_bar);
        s.x_bar_1 = constants::hbar * G * std::norm(s.a_bar) / stiffness;
        const double next = delta + G * s.x_bar_1;
        const double change = std::abs(next - s.delta_bar);
        s.delta_bar = next;
        s.iterations = k;
        if (change <= 1e-15 * std::max(std::abs(next), kappa * 1e-300) || change == 0.0) {
            s.a_bar = source / std::complex<double>(kappa / 2.0, -s.delta_bar);
            s.x_bar_1 = constants::hbar * G * std::norm(s.a_bar) / stiffness;
            return s;
        }
    }
    throw NumericalError("stationary_solution did not converge in 1000 iterations (bistable pump regime?)");
}

struct PumpSetting {
    double alpha_l = 0.0;  // sqrt(photons/s)
    double phi_l = 0.0;    // rad
    double delta = 0.0;    // bare detuning, rad/s
};

// Pump that lands on a requested |abar|, arg abar and effective detuning.
inline PumpSetting pump_for_target(double abar_mag, double abar_arg, double delta_bar, const SystemParams& p,
                                   double omega1_prime) {
    const double kappa = p.cavity.kappa;
    const double x_bar = constants::hbar * p.cavity.G_om * abar_mag * abar_mag /
                         (p.mechanics.M1 * omega1_prime * omega1_prime);
    const std::complex<double> cavity(kappa / 2.0, -delta_bar);
    PumpSetting out;
    out.delta = delta_bar - p.cavity.G_om * x_bar;
    out.alpha_l = abar_mag * std::abs(cavity) / std::sqrt(p.cavity.eta_c * kappa);
    out.phi_l = wrap_phase(-abar_arg - std::arg(cavity));
    return out;
}

struct PerturbationCoefficients {
    std::complex<double> A1;           // m per (sqrt(photons)/s) of probe drive
    std::complex<double> A1_grav;      // s^2, per m/s^2 of gravity drive
    std::complex<double> B;
    std::complex<double> B_grav;
    std::complex<double> C_conj;
    std::complex<double> C_grav_conj;
};

namespace detail {

struct SidebandTerms {
    std::complex<double> chi;        // 1 / [M1 (omega1'^2 - omega^2 - i omega gamma1)]
    std::complex<double> cav_minus;  // i(delta_bar - omega) + kappa/2
    std::complex<double> cav_plus;   // -i(delta_bar + omega) + kappa/2
    std::complex<double> f;
    std::complex<double> denom;
};

inline SidebandTerms sideband_terms(double omega, const SystemParams& p, const DerivedQuantities& d) {
    const double wp = d.omega1_prime;
    const double kappa = p.cavity.kappa;
    const double G = p.cavity.G_om;
    const double abar = p.cavity.abar_mag;
    SidebandTerms t;
    t.chi = 1.0 / (p.mechanics.M1 * std::complex<double>((wp - omega) * (wp + omega), -omega * p.mechanics.gamma1));
    t.cav_minus = {kappa / 2.0, d.delta_bar - omega};
    t.cav_plus = {kappa / 2.0, -(d.delta_bar + omega)};
    t.f = constants::hbar * G * G * abar * abar * t.chi / t.cav_minus;
    t.denom = t.cav_plus + 2.0 * d.delta_bar * t.f;
    return t;
}

} // namespace detail

// The six first-order coefficients at probe frequency omega and gravity
// drive frequency omega_s, in SI units.  C'* is the corrected form without
// a stray hbar; the printed one misses its cavity equation entirely and
// leaves relative residuals near 4e-8 in the mechanical ones.
inline PerturbationCoefficients coefficients(double omega, double omega_s, const SystemParams& p,
                                             const DerivedQuantities& d) {
    const std::complex<double> i(0.0, 1.0);
    const double G = p.cavity.G_om;
    const double abar = p.cavity.abar_mag;
    const double M1 = p.mechanics.M1;
    const auto probe = detail::sideband_terms(omega, p, d);
    const auto grav = detail::sideband_terms(omega_s, p, d);

    PerturbationCoefficients c;
    c.A1 = constants::hbar * G * abar * probe.chi / probe.denom;
    c.B = (1.0 + i * probe.f) / probe.denom;
    c.C_conj = -i * constants::hbar * G * G * abar * abar * probe.chi / (probe.cav_minus * probe.denom);
    c.A1_grav = 0.5 * grav.cav_plus * M1 * grav.chi / grav.denom;
    c.B_grav = 0.5 * i * G * abar * M1 * grav.chi / grav.denom;
    c.C_grav_conj = -0.5 * i * grav.cav_plus * G * abar * M1 * grav.chi / (grav.cav_minus * grav.denom);
    return c;
}

// C'* exactly as printed, kept to show it does not satisfy the system.
inline std::complex<double> printed_c_grav_conj(double omega_s, const SystemParams& p, const DerivedQuantities& d) {
    const std::complex<double> i(0.0, 1.0);
    const auto grav = detail::sideband_terms(omega_s, p, d);
    return -0.5 * i * grav.cav_plus * constants::hbar * p.cavity.G_om * p.cavity.abar_mag * p.mechanics.M1 *
           grav.chi / (grav.cav_minus * grav.denom);
}

// Relative residuals of the eight linear equations the coefficients solve,
// each |lhs - rhs| divided by the sum of the magnitudes of its terms.  The
// mechanical coupling is hbar G_om |abar| (delta a' + delta a'*) / M1.
inline std::array<double, 8> residuals(double omega, double omega_s, const PerturbationCoefficients& c,
                                       const SystemParams& p, const DerivedQuantities& d) {
    const std::complex<double> i(0.0, 1.0);
    const double wp2 = d.omega1_prime * d.omega1_prime;
    const double gamma = p.mechanics.gamma1;
    const double couple_x = constants::hbar * p.cavity.G_om * p.cavity.abar_mag / p.mechanics.M1;
    const double couple_a = p.cavity.G_om * p.cavity.abar_mag;
    const std::complex<double> cav(-p.cavity.kappa / 2.0, d.delta_bar);  // i delta_bar - kappa/2

    const auto A1s = std::conj(c.A1);
    const auto Bs = std::conj(c.B);
    const auto C = std::conj(c.C_conj);
    const auto A1gs = std::conj(c.A1_grav);
    const auto Bgs = std::conj(c.B_grav);
    const auto Cg = std::conj(c.C_grav_conj);

    auto rel = [](std::complex<double> lhs, std::initializer_list<std::complex<double>> rhs) {
        std::complex<double> sum = 0.0;
        double scale = std::abs(lhs);
        for (const auto& term : rhs) {
            sum += term;
            scale += std::abs(term);
        }
        return scale == 0.0 ? 0.0 : std::abs(lhs - sum) / scale;
    };

    const double w = omega;
    const double ws = omega_s;
    return {
        rel(-w * w * c.A1, {-wp2 * c.A1, i * w * gamma * c.A1, couple_x * c.B, couple_x * c.C_conj}),
        rel(-i * w * c.B, {cav * c.B, i * couple_a * c.A1, 1.0}),
        rel(-w * w * A1s, {-wp2 * A1s, -i * w * gamma * A1s, couple_x * C, couple_x * Bs}),
        rel(i * w * C, {cav * C, i * couple_a * A1s}),
        rel(-ws * ws * c.A1_grav,
            {-wp2 * c.A1_grav, i * ws * gamma * c.A1_grav, couple_x * c.B_grav, couple_x * c.C_grav_conj, 0.5}),
        rel(-i * ws * c.B_grav, {cav * c.B_grav, i * couple_a * c.A1_grav}),
        rel(-ws * ws * A1gs, {-wp2 * A1gs, -i * ws * gamma * A1gs, couple_x * Cg, couple_x * Bgs, 0.5}),
        rel(i * ws * Cg, {cav * Cg, i * couple_a * A1gs}),
    };
}

struct LowerSidebandRatio {
    double coefficient_ratio = 0.0;  // |C*| / |B|
    double output_ratio = 0.0;       // |eta_c kappa C| / |t_p|, output at omega_l - omega vs at omega_l + omega
};

// The lower sideband lives at omega_l - omega and never beats with the probe
// output at omega_l + omega; these numbers size it, they do not enter t_p.
inline LowerSidebandRatio lower_sideband_ratio(double omega, const SystemParams& p, const DerivedQuantities& d) {
    const auto c = coefficients(omega, omega, p, d);
    const double loss = p.cavity.eta_c * p.cavity.kappa;
    const auto tp = 1.0 - loss * c.B;
    return {std::abs(c.C_conj) / std::abs(c.B), loss * std::abs(c.C_conj) / std::abs(tp)};
}

struct ForceDecomposition {
    std::complex<double> k_p;  // N/m; real part spring, imaginary part damping
    double F_p = 0.0;          // N
    double phi_fp = 0.0;       // rad
    double k_G = 0.0;          // N/m
    double F_G = 0.0;          // N
    double phi_G = 0.0;        // rad
};

inline ForceDecomposition force_decomposition(double omega, const SystemParams& p, const DerivedQuantities& d) {
    const std::complex<double> i(0.0, 1.0);
    const double kappa = p.cavity.kappa;
    const double abar = p.cavity.abar_mag;
    const double G = p.cavity.G_om;
    ForceDecomposition out;

    // s = delta_bar + omega vanishes on the red sideband at the window;
    // there the two cavity terms are identical and k_p is zero.
    const double s = d.delta_bar + omega;
    if (s == 0.0) {
        out.k_p = 0.0;
    } else {
        const double strength = constants::hbar * G * G * abar * abar;
        out.k_p = i * strength *
                  (1.0 / std::complex<double>(kappa / 2.0, -s) - 1.0 / std::complex<double>(kappa / 2.0, s));
    }

    out.F_p = 4.0 * constants::hbar * G * abar * std::sqrt(p.cavity.eta_c * kappa) * p.probe.alpha_p / kappa;
    out.phi_fp = wrap_phase(p.probe.phi_p + p.cavity.abar_arg);

    const double d3 = p.gravity.d * p.gravity.d * p.gravity.d;
    out.k_G = 2.0 * p.gravity.G_newton * p.mechanics.M1 * p.gravity.M2 / d3;
    out.F_G = out.k_G * p.gravity.x_s;
    out.phi_G = wrap_phase(p.gravity.phi_s + constants::pi);
    return out;
}

// Probe radiation-pressure force amplitude at a general omega.
inline double probe_force_amplitude(double omega, const SystemParams& p, const DerivedQuantities& d) {
    const double kappa = p.cavity.kappa;
    const std::complex<double> cavity(kappa / 2.0, -(d.delta_bar + omega));
    return 2.0 * constants::hbar * p.cavity.G_om * std::sqrt(p.cavity.eta_c * kappa) * p.cavity.abar_mag *
           p.probe.alpha_p / std::abs(cavity);
}

} // namespace gravomit

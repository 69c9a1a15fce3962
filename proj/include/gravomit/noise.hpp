#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "gravomit/error.hpp"
#include "gravomit/params.hpp"
#include "gravomit/response.hpp"

namespace gravomit {

// Force noise spectral densities in N^2/Hz at one analysis frequency.
struct NoiseBudget {
    double omega = 0.0;
    double s_zp = 0.0;
    double s_thermal = 0.0;
    double s_external = 0.0;
    double s_qba = 0.0;
    double s_imprecision = 0.0;  // +inf without optomechanical coupling
    double s_eff = 0.0;
    double tau_seconds = 0.0;    // S_eff / F_G^2
    double tau_inverse = 0.0;      // F_G^2 / S_eff (Hz)
};

namespace detail {

inline double external_force_noise(double omega, const SystemParams& p) {
    const double M1 = p.mechanics.M1;
    const double w1 = p.mechanics.omega1;
    return M1 * M1 * w1 * w1 * w1 * w1 * p.environment.S_x_ext.at(omega);
}

inline NoiseBudget finish_budget(NoiseBudget b, double F_G) {
    b.s_eff = b.s_zp + b.s_thermal + b.s_external + b.s_qba + b.s_imprecision;
    if (F_G == 0.0) {
        b.tau_seconds = std::numeric_limits<double>::infinity();
        b.tau_inverse = 0.0;
    } else {
        b.tau_seconds = b.s_eff / (F_G * F_G);
        b.tau_inverse = 1.0 / b.tau_seconds;
    }
    return b;
}

} // namespace detail

// Mechanical terms use omega1; x_zpf and the susceptibility use omega1'.
inline NoiseBudget noise_budget(double omega, const SystemParams& p, const DerivedQuantities& d) {
    const double hbar = constants::hbar;
    const double gamma1 = p.mechanics.gamma1;
    const double M1 = p.mechanics.M1;
    const double w1 = p.mechanics.omega1;
    const double coop = d.coop;
    const double xz2 = d.x_zpf * d.x_zpf;

    NoiseBudget b;
    b.omega = omega;
    b.s_zp = gamma1 * hbar * M1 * w1;
    b.s_thermal = 2.0 * b.s_zp * d.n_bar_1;
    b.s_external = detail::external_force_noise(omega, p);
    b.s_qba = 2.0 * coop / xz2 * gamma1 * hbar * hbar;
    if (coop == 0.0) {
        b.s_imprecision = std::numeric_limits<double>::infinity();
    } else {
        const double chi2 = std::norm(susceptibility(omega, p.mechanics, d.omega1_prime));
        b.s_imprecision = (0.5 + p.probe.S_add) / (4.0 * coop * gamma1 * chi2 / xz2);
    }
    return detail::finish_budget(b, d.F_G);
}

inline std::vector<NoiseBudget> noise_table(const std::vector<double>& grid, const SystemParams& p,
                                            const DerivedQuantities& d) {
    std::vector<NoiseBudget> out;
    out.reserve(grid.size());
    for (double omega : grid) {
        out.push_back(noise_budget(omega, p, d));
    }
    return out;
}

// Flat S_x^E (m^2/Hz) that stretches tau_seconds at `omega` to `target_tau`.
inline double required_external_noise(double target_tau, double omega, const SystemParams& p,
                                      const DerivedQuantities& d) {
    SystemParams quiet = p;
    quiet.environment.S_x_ext = ExternalNoise(0.0);
    const NoiseBudget floor = noise_budget(omega, quiet, d);
    if (!std::isfinite(floor.s_eff) || d.F_G == 0.0) {
        throw DomainError("required_external_noise: tau is unbounded for this configuration");
    }
    const double missing = target_tau * d.F_G * d.F_G - floor.s_eff;
    if (std::abs(missing) <= 4.0 * std::numeric_limits<double>::epsilon() * floor.s_eff) {
        return 0.0;
    }
    if (missing < 0.0) {
        throw DomainError("unreachable: target tau is below the floor set by S_x^E = 0 (" +
                          std::to_string(floor.tau_seconds) + " s)");
    }
    const double M1 = p.mechanics.M1;
    const double w1 = p.mechanics.omega1;
    return missing / (M1 * M1 * w1 * w1 * w1 * w1);
}

} // namespace gravomit

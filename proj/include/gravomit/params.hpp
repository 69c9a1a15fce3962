#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gravomit/error.hpp"
#include "gravomit/units.hpp"

namespace gravomit {

// All fields SI; frequencies and rates angular (rad/s).

struct MechanicsParams {
    double M1 = 0.0;      // kg
    double omega1 = 0.0;  // rad/s, unloaded natural frequency
    double gamma1 = 0.0;  // rad/s, energy damping rate
    double Q1 = 0.0;      // omega1 / gamma1

    static MechanicsParams from_damping(double mass, double omega, double gamma) {
        return {mass, omega, gamma, omega / gamma};
    }
    static MechanicsParams from_quality(double mass, double omega, double quality) {
        return {mass, omega, omega / quality, quality};
    }
};

struct CavityParams {
    double kappa = 0.0;       // rad/s, total dissipation
    double eta_c = 0.5;       // kappa_ext / kappa
    double delta_bar = 0.0;   // rad/s, effective pump-cavity detuning
    bool red_sideband = true; // pin delta_bar to -omega1' (overrides delta_bar)
    double G_om = 0.0;        // rad s^-1 m^-1
    double abar_mag = 0.0;    // sqrt(photons)
    double abar_arg = 0.0;    // rad
    double omega_c = 0.0;     // rad/s
};

struct GravityDriveParams {
    double M2 = 0.0;      // kg
    double d = 0.0;       // m
    double x_s = 0.0;     // m
    double phi_s = 0.0;   // rad
    double G_newton = constants::G_newton;
    bool allow_large_amplitude = false;  // lift the x_s < 0.1 d guard
};

struct ProbeParams {
    double P_p = 0.0;      // W
    double omega_p = 0.0;  // rad/s
    double phi_p = 0.0;    // rad
    double alpha_p = 0.0;  // sqrt(photons/s)
    double S_add = 0.0;    // added detection noise, quanta

    static double amplitude_from_power(double power, double omega) {
        return std::sqrt(power / (constants::hbar * omega));
    }
};

// Displacement noise S_x^E(omega) in m^2/Hz: flat, or tabulated against
// angular frequency with linear interpolation and constant extension.
class ExternalNoise {
public:
    ExternalNoise() = default;
    explicit ExternalNoise(double flat) : flat_(flat) {}
    explicit ExternalNoise(std::vector<std::pair<double, double>> table) : table_(std::move(table)) {
        std::sort(table_.begin(), table_.end());
    }

    bool tabulated() const { return !table_.empty(); }
    const std::vector<std::pair<double, double>>& table() const { return table_; }
    double flat() const { return flat_; }

    double at(double omega) const {
        if (table_.empty()) {
            return flat_;
        }
        if (omega <= table_.front().first) {
            return table_.front().second;
        }
        if (omega >= table_.back().first) {
            return table_.back().second;
        }
        auto hi = std::lower_bound(table_.begin(), table_.end(), std::make_pair(omega, 0.0),
                                   [](const auto& a, const auto& b) { return a.first < b.first; });
        auto lo = std::prev(hi);
        const double w = (omega - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
    }

    double min_value() const {
        if (table_.empty()) {
            return flat_;
        }
        double m = table_.front().second;
        for (const auto& [w, s] : table_) {
            m = std::min(m, s);
        }
        return m;
    }

private:
    double flat_ = 0.0;
    std::vector<std::pair<double, double>> table_;
};

struct EnvironmentParams {
    double T = 0.0;  // K
    ExternalNoise S_x_ext;
};

struct MembraneParams {
    double sigma = 0.0;        // Pa
    double rho = 0.0;          // kg/m^3
    double side_l = 0.0;       // m
    double thickness_b = 0.0;  // m
};

struct SystemParams {
    MechanicsParams mechanics;
    CavityParams cavity;
    GravityDriveParams gravity;
    ProbeParams probe;
    EnvironmentParams environment;
    std::optional<MembraneParams> membrane;
};

struct DerivedQuantities {
    double omega1_prime = 0.0;   // rad/s, gravity-softened frequency
    double omega1_shift = 0.0;   // omega1' - omega1 without cancellation, rad/s
    double gravity_spring = 0.0; // omega1^2 - omega1'^2 = 2 G M2 / d^3, rad^2/s^2
    double delta_bar = 0.0;      // rad/s, effective detuning actually used
    double x_zpf = 0.0;          // m
    double g0 = 0.0;             // rad/s
    double g = 0.0;              // rad/s
    double gamma_eff = 0.0;      // gamma1 + 4 g^2 / kappa
    double F_G = 0.0;            // N
    double F_p = 0.0;            // N
    std::optional<double> r;     // F_G / F_p; empty when F_p == 0
    double phi = 0.0;            // phi_fp - phi_G in (-pi, pi]
    double phi_fp = 0.0;
    double phi_G = 0.0;
    double k_G = 0.0;            // N/m
    double n_bar_1 = 0.0;
    double coop = 0.0;
    double n_bar_p = 0.0;        // linewidths in ordinary frequency
    double snr_shot = 0.0;
    double n_bar_p_angular = 0.0;
    double snr_shot_angular = 0.0;

    double force_ratio() const {
        if (!r) {
            throw DomainError("force ratio r requested but the probe force F_p is zero");
        }
        return *r;
    }
};

// Wraps a phase into (-pi, pi].
inline double wrap_phase(double phase) {
    double w = std::remainder(phase, constants::two_pi);
    if (w <= -constants::pi) {
        w += constants::two_pi;
    }
    return w;
}

inline double zero_point_fluctuation(double mass, double omega) {
    if (!(mass > 0.0) || !(omega > 0.0)) {
        throw DomainError("zero_point_fluctuation needs positive mass and frequency");
    }
    return std::sqrt(constants::hbar / (2.0 * mass * omega));
}

// Bose occupation 1/(exp(hbar omega / k_B T) - 1); zero at T = 0.
inline double phonon_occupancy(double temperature, double omega) {
    if (!(omega > 0.0) || temperature < 0.0) {
        throw DomainError("phonon_occupancy needs omega > 0 and T >= 0");
    }
    if (temperature == 0.0) {
        return 0.0;
    }
    return 1.0 / std::expm1(constants::hbar * omega / (constants::k_boltzmann * temperature));
}

struct ProbePhotonNumber {
    double n_bar_p = 0.0;           // linewidth and detuning taken in Hz
    double snr_shot = 0.0;
    double n_bar_p_angular = 0.0;   // same expression with rad/s
    double snr_shot_angular = 0.0;
};

// n_p = eta_c (P_p / hbar omega_p) 4 kappa / (kappa^2 + 4 (omega_p - omega_c)^2).
// The headline value evaluates the Lorentzian with kappa and the detuning in
// ordinary frequency, which is how the tabulated photon number of ~1e2 comes
// out; the angular evaluation is 2 pi smaller and is reported next to it.
inline ProbePhotonNumber probe_photon_number(const ProbeParams& probe, const CavityParams& cavity) {
    const double flux = probe.P_p / (constants::hbar * probe.omega_p);
    auto lorentz = [&](double kappa, double detuning) {
        return 4.0 * kappa / (kappa * kappa + 4.0 * detuning * detuning);
    };
    const double detuning = probe.omega_p - cavity.omega_c;
    ProbePhotonNumber out;
    out.n_bar_p_angular = cavity.eta_c * flux * lorentz(cavity.kappa, detuning);
    out.n_bar_p = cavity.eta_c * flux *
                  lorentz(cavity.kappa / constants::two_pi, detuning / constants::two_pi);
    out.snr_shot = std::sqrt(out.n_bar_p);
    out.snr_shot_angular = std::sqrt(out.n_bar_p_angular);
    return out;
}

// Fundamental drum mode of the bare prestressed square membrane,
// omega_0 = 2 pi sqrt(sigma / (2 rho l^2)).
inline double prestressed_frequency(const MembraneParams& m) {
    if (!(m.sigma > 0.0) || !(m.rho > 0.0) || !(m.side_l > 0.0) || !(m.thickness_b > 0.0)) {
        throw DomainError("membrane parameters must all be positive");
    }
    return constants::two_pi * std::sqrt(m.sigma / (2.0 * m.rho * m.side_l * m.side_l));
}

// Throws ConfigError naming the offending field.
inline void validate(const SystemParams& p) {
    auto require = [](bool ok, const char* path, const char* what) {
        if (!ok) {
            throw ConfigError::at(path, what);
        }
    };
    const auto& m = p.mechanics;
    require(m.M1 > 0.0, "mechanics.M1", "must be positive");
    require(m.omega1 > 0.0, "mechanics.omega1", "must be positive");
    require(m.gamma1 > 0.0, "mechanics.gamma1", "must be positive");
    require(m.Q1 > 0.0 && std::abs(m.Q1 - m.omega1 / m.gamma1) / m.Q1 < 1e-9, "mechanics.Q1",
            "inconsistent with omega1 / gamma1");

    const auto& c = p.cavity;
    require(c.kappa > 0.0, "cavity.kappa", "must be positive");
    require(c.eta_c >= 0.0 && c.eta_c <= 1.0, "cavity.eta_c", "must lie in [0, 1]");
    require(c.abar_mag >= 0.0, "cavity.abar_mag", "must be non-negative");
    require(std::isfinite(c.G_om), "cavity.G_om", "must be finite");

    const auto& g = p.gravity;
    require(g.M2 >= 0.0, "gravity.M2", "must be non-negative");
    require(g.d > 0.0, "gravity.d", "must be positive");
    require(g.x_s >= 0.0, "gravity.x_s", "must be non-negative");
    require(g.G_newton >= 0.0, "gravity.G_newton", "must be non-negative");
    require(g.allow_large_amplitude || g.x_s < 0.1 * g.d, "gravity.x_s",
            "drive amplitude too large: x_s must stay below 0.1 d for the quadratic gravity expansion");

    const auto& pr = p.probe;
    require(pr.P_p >= 0.0, "probe.P_p", "must be non-negative");
    require(pr.omega_p > 0.0, "probe.omega_p", "must be positive");
    require(std::abs(pr.alpha_p * pr.alpha_p * constants::hbar * pr.omega_p - pr.P_p) <=
                1e-12 * std::max(pr.P_p, 1e-300),
            "probe.alpha_p", "inconsistent with P_p");
    require(pr.S_add >= 0.0, "probe.S_add", "must be non-negative");

    require(p.environment.T >= 0.0, "environment.T", "must be non-negative");
    require(p.environment.S_x_ext.min_value() >= 0.0, "environment.S_x_ext", "must be non-negative");

    if (p.membrane) {
        const auto& mb = *p.membrane;
        require(mb.sigma > 0.0, "membrane.sigma", "must be positive");
        require(mb.rho > 0.0, "membrane.rho", "must be positive");
        require(mb.side_l > 0.0, "membrane.side_l", "must be positive");
        require(mb.thickness_b > 0.0, "membrane.thickness_b", "must be positive");
    }
}

// Every scalar the model needs, computed once from the raw configuration.
inline DerivedQuantities derive(const SystemParams& p) {
    validate(p);
    const auto& mech = p.mechanics;
    const auto& cav = p.cavity;
    const auto& grav = p.gravity;
    const auto& probe = p.probe;

    DerivedQuantities out;
    const double d3 = grav.d * grav.d * grav.d;
    out.gravity_spring = 2.0 * grav.G_newton * grav.M2 / d3;
    const double omega_sq = mech.omega1 * mech.omega1 - out.gravity_spring;
    if (!(omega_sq > 0.0)) {
        throw DomainError("gravitational spring exceeds the mechanical stiffness (omega1^2 < 2 G M2 / d^3)");
    }
    out.omega1_prime = out.gravity_spring == 0.0 ? mech.omega1 : std::sqrt(omega_sq);
    out.omega1_shift = -out.gravity_spring / (mech.omega1 + out.omega1_prime);
    out.delta_bar = cav.red_sideband ? -out.omega1_prime : cav.delta_bar;

    out.x_zpf = zero_point_fluctuation(mech.M1, out.omega1_prime);
    out.g0 = cav.G_om * out.x_zpf;
    out.g = out.g0 * cav.abar_mag;
    out.gamma_eff = mech.gamma1 + 4.0 * out.g * out.g / cav.kappa;

    out.k_G = 2.0 * grav.G_newton * mech.M1 * grav.M2 / d3;
    out.F_G = out.k_G * grav.x_s;
    out.F_p = 4.0 * constants::hbar * cav.G_om * cav.abar_mag * std::sqrt(cav.eta_c * cav.kappa) *
              probe.alpha_p / cav.kappa;
    if (out.F_p != 0.0) {
        out.r = out.F_G / out.F_p;
    }

    out.phi_fp = wrap_phase(cav.abar_arg + probe.phi_p);
    out.phi_G = wrap_phase(grav.phi_s + constants::pi);
    out.phi = wrap_phase(cav.abar_arg + probe.phi_p - grav.phi_s - constants::pi);

    out.n_bar_1 = phonon_occupancy(p.environment.T, mech.omega1);
    out.coop = 4.0 * out.g * out.g / (cav.kappa * mech.gamma1);
    const auto photons = probe_photon_number(probe, cav);
    out.n_bar_p = photons.n_bar_p;
    out.snr_shot = photons.snr_shot;
    out.n_bar_p_angular = photons.n_bar_p_angular;
    out.snr_shot_angular = photons.snr_shot_angular;
    return out;
}

// FNV-1a over every numeric input; identifies the configuration a result came from.
inline std::uint64_t fingerprint(const SystemParams& p) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    };
    const auto& m = p.mechanics;
    const auto& c = p.cavity;
    const auto& g = p.gravity;
    const auto& pr = p.probe;
    for (double v : {m.M1, m.omega1, m.gamma1, m.Q1, c.kappa, c.eta_c, c.delta_bar, c.red_sideband ? 1.0 : 0.0,
                     c.G_om, c.abar_mag, c.abar_arg, c.omega_c, g.M2, g.d, g.x_s, g.phi_s, g.G_newton,
                     pr.P_p, pr.omega_p, pr.phi_p, pr.alpha_p, pr.S_add, p.environment.T,
                     p.environment.S_x_ext.flat()}) {
        mix(v);
    }
    for (const auto& [w, s] : p.environment.S_x_ext.table()) {
        mix(w);
        mix(s);
    }
    if (p.membrane) {
        for (double v : {p.membrane->sigma, p.membrane->rho, p.membrane->side_l, p.membrane->thickness_b}) {
            mix(v);
        }
    }
    return h;
}

} // namespace gravomit

#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace gravomit {

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;      // J s (CODATA 2018, exact h / 2pi to 10 digits)
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K (exact)
inline constexpr double G_newton = 6.67430e-11;      // m^3 kg^-1 s^-2 (CODATA 2018)
} // namespace constants

// Physical dimension a config field is declared with.  Internally every
// quantity is SI and every frequency or rate is angular (rad/s).
enum class Dimension {
    dimensionless,
    mass,
    length,
    angular_frequency,
    phase,
    power,
    temperature,
    pressure,
    density,
    coupling,  // frequency shift per displacement
    gravitational_constant,
    displacement_psd,
    photon_flux_amplitude,
    field_amplitude,
};

inline std::string_view dimension_name(Dimension d) {
    switch (d) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::mass: return "mass";
    case Dimension::length: return "length";
    case Dimension::angular_frequency: return "frequency";
    case Dimension::phase: return "phase";
    case Dimension::power: return "power";
    case Dimension::temperature: return "temperature";
    case Dimension::pressure: return "pressure";
    case Dimension::density: return "density";
    case Dimension::coupling: return "frequency-per-length";
    case Dimension::gravitational_constant: return "gravitational constant";
    case Dimension::displacement_psd: return "displacement spectral density";
    case Dimension::photon_flux_amplitude: return "photon-flux amplitude";
    case Dimension::field_amplitude: return "field amplitude";
    }
    return "unknown";
}

struct UnitOptions {
    // "Hz/m" couplings are read as rad s^-1 m^-1 (no 2pi) unless cleared.
    bool hz_per_meter_is_angular = true;
};

namespace detail {

struct UnitEntry {
    std::string_view tag;
    Dimension dimension;
    double factor;
};

inline constexpr double tp = constants::two_pi;

inline constexpr auto unit_table = std::to_array<UnitEntry>({
    {"1", Dimension::dimensionless, 1.0},
    {"", Dimension::dimensionless, 1.0},
    {"quanta", Dimension::dimensionless, 1.0},
    {"kg", Dimension::mass, 1.0},
    {"g", Dimension::mass, 1e-3},
    {"mg", Dimension::mass, 1e-6},
    {"ug", Dimension::mass, 1e-9},
    {"m", Dimension::length, 1.0},
    {"cm", Dimension::length, 1e-2},
    {"mm", Dimension::length, 1e-3},
    {"um", Dimension::length, 1e-6},
    {"nm", Dimension::length, 1e-9},
    {"pm", Dimension::length, 1e-12},
    {"fm", Dimension::length, 1e-15},
    {"am", Dimension::length, 1e-18},
    {"rad/s", Dimension::angular_frequency, 1.0},
    {"mHz", Dimension::angular_frequency, tp * 1e-3},
    {"Hz", Dimension::angular_frequency, tp},
    {"kHz", Dimension::angular_frequency, tp * 1e3},
    {"MHz", Dimension::angular_frequency, tp * 1e6},
    {"GHz", Dimension::angular_frequency, tp * 1e9},
    {"rad", Dimension::phase, 1.0},
    {"deg", Dimension::phase, constants::pi / 180.0},
    {"pi_rad", Dimension::phase, constants::pi},
    {"W", Dimension::power, 1.0},
    {"mW", Dimension::power, 1e-3},
    {"uW", Dimension::power, 1e-6},
    {"nW", Dimension::power, 1e-9},
    {"pW", Dimension::power, 1e-12},
    {"fW", Dimension::power, 1e-15},
    {"aW", Dimension::power, 1e-18},
    {"K", Dimension::temperature, 1.0},
    {"mK", Dimension::temperature, 1e-3},
    {"uK", Dimension::temperature, 1e-6},
    {"Pa", Dimension::pressure, 1.0},
    {"kPa", Dimension::pressure, 1e3},
    {"MPa", Dimension::pressure, 1e6},
    {"GPa", Dimension::pressure, 1e9},
    {"kg/m^3", Dimension::density, 1.0},
    {"g/cm^3", Dimension::density, 1e3},
    {"rad/s/m", Dimension::coupling, 1.0},
    {"Hz/m", Dimension::coupling, tp},  // see UnitOptions
    {"kHz/nm", Dimension::coupling, tp * 1e12},
    {"MHz/nm", Dimension::coupling, tp * 1e15},
    {"m^3/(kg s^2)", Dimension::gravitational_constant, 1.0},
    {"m^2/Hz", Dimension::displacement_psd, 1.0},
    {"sqrt(photons/s)", Dimension::photon_flux_amplitude, 1.0},
    {"sqrt(photons)", Dimension::field_amplitude, 1.0},
    {"1/sqrt(s)", Dimension::photon_flux_amplitude, 1.0},
    {"1", Dimension::field_amplitude, 1.0},
    {"", Dimension::field_amplitude, 1.0},
});

} // namespace detail

// Factor that converts a value tagged `unit` into the internal unit of
// `dimension`; empty when the tag is unknown or belongs to another dimension.
inline std::optional<double> unit_factor(std::string_view unit, Dimension dimension,
                                         const UnitOptions& options = {}) {
    for (const auto& entry : detail::unit_table) {
        if (entry.tag != unit || entry.dimension != dimension) {
            continue;
        }
        if (dimension == Dimension::coupling && unit == "Hz/m" && options.hz_per_meter_is_angular) {
            return 1.0;
        }
        return entry.factor;
    }
    return std::nullopt;
}

inline bool is_known_unit(std::string_view unit) {
    for (const auto& entry : detail::unit_table) {
        if (entry.tag == unit) {
            return true;
        }
    }
    return false;
}

} // namespace gravomit

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

#include "gravomit/error.hpp"
#include "gravomit/params.hpp"
#include "gravomit/scalar.hpp"

namespace gravomit {

enum class SpectrumKind { driven, undriven, unloaded, lorentzian_driven, lorentzian_undriven, oracle };

inline std::string_view kind_name(SpectrumKind k) {
    switch (k) {
    case SpectrumKind::driven: return "driven";
    case SpectrumKind::undriven: return "undriven";
    case SpectrumKind::unloaded: return "unloaded";
    case SpectrumKind::lorentzian_driven: return "lorentzian_driven";
    case SpectrumKind::lorentzian_undriven: return "lorentzian_undriven";
    case SpectrumKind::oracle: return "oracle";
    }
    return "unknown";
}

// The handful of scalars the transmission depends on, in rad/s.
struct WindowParams {
    double omega1_prime = 0.0;
    double gamma1 = 0.0;
    double kappa = 0.0;
    double eta_c = 0.0;
    double delta_bar = 0.0;
    double pump_offset = 0.0;     // delta_bar + omega1', zero on the red sideband
    double coupling = 0.0;        // hbar G_om^2 |abar|^2 / M1 = 2 omega1' g^2
    double g = 0.0;
    double r = 0.0;
    double phi = 0.0;
    double spring_offset = 0.0;   // omega1^2 - omega1'^2
};

inline WindowParams window_params(const SystemParams& p, const DerivedQuantities& d) {
    WindowParams w;
    w.omega1_prime = d.omega1_prime;
    w.gamma1 = p.mechanics.gamma1;
    w.kappa = p.cavity.kappa;
    w.eta_c = p.cavity.eta_c;
    w.delta_bar = d.delta_bar;
    w.pump_offset = p.cavity.red_sideband ? 0.0 : d.delta_bar + d.omega1_prime;
    w.coupling = 2.0 * d.omega1_prime * d.g * d.g;
    w.g = d.g;
    w.r = d.r.value_or(0.0);
    w.phi = d.phi;
    w.spring_offset = d.gravity_spring;
    return w;
}

// |t|^2 and its slope with respect to the window offset.
template <class Real>
struct PowerAndSlope {
    Real power;
    Real slope;
};

// Full transmission evaluated at the window offset delta' = omega - omega1'.
// Writing omega_chi^2 - omega^2 = eps - delta'(2 omega1' + delta') keeps the
// nearly cancelling resonance term exact, which matters once differences of
// 1e-16 between two spectra have to be resolved.
template <class Real>
class TransmissionModel {
public:
    using complex_type = std::complex<Real>;

    TransmissionModel(const WindowParams& w, SpectrumKind kind)
        : omega1_prime_(w.omega1_prime),
          gamma1_(w.gamma1),
          kappa_(w.kappa),
          loss_(Real(w.eta_c) * Real(w.kappa)),
          delta_bar_(w.delta_bar),
          pump_offset_(w.pump_offset),
          coupling_(w.coupling),
          minus_offset_(Real(w.delta_bar) - Real(w.omega1_prime)),
          kind_(kind) {
        if (kind == SpectrumKind::unloaded) {
            spring_offset_ = Real(w.spring_offset);
        }
        if (kind == SpectrumKind::driven) {
            const Real r(w.r);
            drive_ = complex_type(r * Real(std::cos(w.phi)), r * Real(std::sin(w.phi)));
        } else if (kind != SpectrumKind::undriven && kind != SpectrumKind::unloaded) {
            throw DomainError("TransmissionModel handles the full driven, undriven and unloaded forms only");
        }
    }

    SpectrumKind kind() const { return kind_; }
    Real omega1_prime() const { return omega1_prime_; }

    // Pieces shared by the value and the derivative.
    struct Terms {
        complex_type mech;        // omega_chi^2 - omega^2 - i omega gamma1
        complex_type cav_minus;   // i(delta_bar - omega) + kappa/2
        complex_type cav_plus;    // -i(delta_bar + omega) + kappa/2
        complex_type f;
        complex_type numer;
        complex_type denom;
    };

    Terms terms(Real offset) const {
        const complex_type i(0, 1);
        const Real omega = omega1_prime_ + offset;
        Terms t;
        t.mech = complex_type(spring_offset_ - offset * (Real(2) * omega1_prime_ + offset), -omega * gamma1_);
        t.cav_minus = complex_type(kappa_ / Real(2), minus_offset_ - offset);
        t.cav_plus = complex_type(kappa_ / Real(2), -(pump_offset_ + offset));
        t.f = coupling_ / (t.mech * t.cav_minus);
        t.denom = t.cav_plus + Real(2) * delta_bar_ * t.f;
        t.numer = Real(1) + i * t.f * (Real(1) + drive_ * (Real(2) / kappa_) * t.cav_minus);
        return t;
    }

    complex_type at_offset(Real offset) const {
        const Terms t = terms(offset);
        return Real(1) - loss_ * t.numer / t.denom;
    }

    // Coefficient c with t = 1 - eta_c kappa c.
    complex_type intracavity_at_offset(Real offset) const {
        const Terms t = terms(offset);
        return t.numer / t.denom;
    }

    Real power(Real offset) const { return norm_sq(at_offset(offset)); }

    // Closed-form d|t|^2/d offset.
    PowerAndSlope<Real> power_slope(Real offset) const {
        const complex_type i(0, 1);
        const Terms t = terms(offset);
        const Real omega = omega1_prime_ + offset;
        const complex_type d_mech(-Real(2) * omega, -gamma1_);
        const complex_type d_cav(0, -1);
        const complex_type chi = Real(1) / t.mech;
        const complex_type d_chi = -d_mech * chi * chi;
        const complex_type d_f = coupling_ * (d_chi * t.cav_minus - chi * d_cav) / (t.cav_minus * t.cav_minus);
        const complex_type d_denom = d_cav + Real(2) * delta_bar_ * d_f;
        const complex_type scaled_drive = drive_ * (Real(2) / kappa_);
        const complex_type d_numer = i * d_f * (Real(1) + scaled_drive * t.cav_minus) + i * t.f * scaled_drive * d_cav;
        const complex_type trans = Real(1) - loss_ * t.numer / t.denom;
        const complex_type d_trans = -loss_ * (d_numer * t.denom - t.numer * d_denom) / (t.denom * t.denom);
        return {norm_sq(trans), Real(2) * (trans.real() * d_trans.real() + trans.imag() * d_trans.imag())};
    }

private:
    Real omega1_prime_;
    Real gamma1_;
    Real kappa_;
    Real loss_;
    Real delta_bar_;
    Real pump_offset_;
    Real coupling_;
    Real minus_offset_;
    Real spring_offset_ = Real(0);
    complex_type drive_ = complex_type(0, 0);
    SpectrumKind kind_;
};

struct ResponsePoint {
    double omega = 0.0;
    std::complex<double> chi;
    std::complex<double> f;
    std::complex<double> delta_a_amp;
};

// chi(omega) = 1 / [M1 (omega1'^2 - omega^2 - i omega gamma1)]
inline std::complex<double> susceptibility(double omega, const MechanicsParams& mech, double omega1_prime) {
    const double offset = omega - omega1_prime;
    const std::complex<double> denom(-offset * (2.0 * omega1_prime + offset), -omega * mech.gamma1);
    return 1.0 / (mech.M1 * denom);
}

inline std::complex<double> backaction_f(double omega, const SystemParams& p, const DerivedQuantities& d) {
    return TransmissionModel<double>(window_params(p, d), SpectrumKind::undriven).terms(omega - d.omega1_prime).f;
}

inline std::complex<double> transmission_undriven(double omega, const SystemParams& p, const DerivedQuantities& d) {
    return TransmissionModel<double>(window_params(p, d), SpectrumKind::undriven).at_offset(omega - d.omega1_prime);
}

inline std::complex<double> transmission_driven(double omega, const SystemParams& p, const DerivedQuantities& d) {
    return TransmissionModel<double>(window_params(p, d), SpectrumKind::driven).at_offset(omega - d.omega1_prime);
}

// Same form with the mechanical resonance back at omega1; delta_bar and g
// keep their loaded values.
inline std::complex<double> transmission_unloaded(double omega, const SystemParams& p, const DerivedQuantities& d) {
    return TransmissionModel<double>(window_params(p, d), SpectrumKind::unloaded).at_offset(omega - d.omega1_prime);
}

inline std::complex<double> intracavity_response(double omega, const SystemParams& p, const DerivedQuantities& d) {
    return TransmissionModel<double>(window_params(p, d), SpectrumKind::driven)
        .intracavity_at_offset(omega - d.omega1_prime);
}

inline ResponsePoint response_point(double omega, const SystemParams& p, const DerivedQuantities& d) {
    return {omega, susceptibility(omega, p.mechanics, d.omega1_prime), backaction_f(omega, p, d),
            intracavity_response(omega, p, d)};
}

// Near-window Lorentzian forms, valid for eta_c = 1/2 on the red sideband.
inline void require_lorentzian_conditions(const WindowParams& w) {
    const bool ok = std::abs(w.eta_c - 0.5) <= 1e-12 &&
                    std::abs(w.delta_bar + w.omega1_prime) <= 1e-12 * w.omega1_prime;
    if (!ok) {
        throw DomainError("approximation conditions not met: Lorentzian form needs eta_c = 1/2 and delta_bar = -omega1'");
    }
}

inline std::complex<double> lorentzian_transmission(double delta_prime, const WindowParams& w, bool driven) {
    require_lorentzian_conditions(w);
    const double g2 = w.g * w.g;
    const double wp = w.omega1_prime;
    const std::complex<double> tilt(1.0, w.kappa / (4.0 * wp));
    std::complex<double> numer = 4.0 * g2 * tilt;
    if (driven) {
        numer *= 1.0 + std::polar(w.r, w.phi);
    }
    const std::complex<double> denom(4.0 * g2 + w.kappa * w.gamma1 + w.kappa * w.kappa / (2.0 * wp) * delta_prime,
                                     w.kappa * w.kappa * w.gamma1 / (4.0 * wp) - 2.0 * w.kappa * delta_prime);
    return numer / denom;
}

inline std::complex<double> lorentzian_transmission(double delta_prime, const SystemParams& p,
                                                    const DerivedQuantities& d, bool driven) {
    return lorentzian_transmission(delta_prime, window_params(p, d), driven);
}

// Companion |t|^2 form.
inline double lorentzian_power(double delta_prime, const WindowParams& w, bool driven) {
    require_lorentzian_conditions(w);
    const double g2 = w.g * w.g;
    const double tilt = 1.0 + w.kappa * w.kappa / (16.0 * w.omega1_prime * w.omega1_prime);
    const double width = 4.0 * g2 / tilt + w.kappa * w.gamma1;
    const double shifted = delta_prime + g2 / (2.0 * w.omega1_prime * tilt);
    double value = 16.0 * g2 * g2 / (width * width + 4.0 * w.kappa * w.kappa * shifted * shifted);
    if (driven) {
        value *= std::norm(1.0 + std::polar(w.r, w.phi));
    }
    return value;
}

// FWHM of the power form: gamma1 + 4 g^2 / (kappa (1 + kappa^2 / 16 omega1'^2)).
inline double lorentzian_fwhm(const WindowParams& w) {
    const double tilt = 1.0 + w.kappa * w.kappa / (16.0 * w.omega1_prime * w.omega1_prime);
    return w.gamma1 + 4.0 * w.g * w.g / (w.kappa * tilt);
}

struct ComplexSpectrum {
    std::vector<double> omega_grid;
    std::vector<std::complex<double>> values;
    SpectrumKind kind = SpectrumKind::undriven;
    std::uint64_t params_hash = 0;
};

inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo)) {
        throw DomainError("grid needs at least two points and hi > lo");
    }
    std::vector<double> grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t k = 0; k < points; ++k) {
        grid[k] = lo + step * static_cast<double>(k);
    }
    grid.back() = hi;
    return grid;
}

// omega in [-delta_bar - 3 kappa, -delta_bar + 3 kappa].
inline std::vector<double> default_grid(const SystemParams& p, const DerivedQuantities& d, std::size_t points = 4001) {
    const double center = -d.delta_bar;
    return linear_grid(center - 3.0 * p.cavity.kappa, center + 3.0 * p.cavity.kappa, points);
}

// The default span magnified by `zoom` (5e-7 by default) around omega1'.
inline std::vector<double> zoom_grid(const SystemParams& p, const DerivedQuantities& d, double zoom = 5e-7,
                                     std::size_t points = 4001) {
    const double half = 3.0 * p.cavity.kappa * zoom;
    return linear_grid(d.omega1_prime - half, d.omega1_prime + half, points);
}

inline ComplexSpectrum evaluate_spectrum(SpectrumKind kind, const std::vector<double>& grid, const SystemParams& p,
                                         const DerivedQuantities& d) {
    ComplexSpectrum out;
    out.kind = kind;
    out.omega_grid = grid;
    out.params_hash = fingerprint(p);
    out.values.reserve(grid.size());
    const WindowParams w = window_params(p, d);
    switch (kind) {
    case SpectrumKind::driven:
    case SpectrumKind::undriven:
    case SpectrumKind::unloaded: {
        const TransmissionModel<double> model(w, kind);
        for (double omega : grid) {
            out.values.push_back(model.at_offset(omega - d.omega1_prime));
        }
        break;
    }
    case SpectrumKind::lorentzian_driven:
    case SpectrumKind::lorentzian_undriven:
        for (double omega : grid) {
            out.values.push_back(
                lorentzian_transmission(omega - d.omega1_prime, w, kind == SpectrumKind::lorentzian_driven));
        }
        break;
    case SpectrumKind::oracle:
        throw DomainError("oracle spectra come from the time-domain integrator");
    }
    return out;
}

} // namespace gravomit

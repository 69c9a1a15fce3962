#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <future>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "gravomit/error.hpp"
#include "gravomit/params.hpp"
#include "gravomit/response.hpp"
#include "gravomit/scalar.hpp"

namespace gravomit {

enum class Precision { standard, extended };
enum class FwhmMode { absolute, baseline };

inline std::string_view precision_name(Precision p) {
    return p == Precision::standard ? real_traits<double>::name() : real_traits<extended_real>::name();
}

struct PeakOptions {
    Precision precision = Precision::extended;
    FwhmMode fwhm_mode = FwhmMode::absolute;
    double scan_half_width = 10.0;   // in gamma_eff around omega1'
    int scan_points = 2001;
    double baseline_distance = 20.0; // in gamma_eff, baseline mode only
};

struct PeakMetrics {
    double height = 0.0;     // max |t_p|^2
    double omega_max = 0.0;  // rad/s
    double offset = 0.0;     // omega_max - omega1', carried separately to keep its digits
    double fwhm = 0.0;       // rad/s
    double baseline = 0.0;   // half-height reference level below the peak
};

// |t|^2 of the near-window Lorentzian power form with its slope.
template <class Real>
class LorentzianPowerModel {
public:
    LorentzianPowerModel(const WindowParams& w, bool driven) {
        require_lorentzian_conditions(w);
        const Real g2 = Real(w.g) * Real(w.g);
        const Real wp(w.omega1_prime);
        const Real kappa(w.kappa);
        const Real tilt = Real(1) + kappa * kappa / (Real(16) * wp * wp);
        width_ = Real(4) * g2 / tilt + kappa * Real(w.gamma1);
        shift_ = g2 / (Real(2) * wp * tilt);
        four_kappa_sq_ = Real(4) * kappa * kappa;
        numer_ = Real(16) * g2 * g2;
        if (driven) {
            const Real re = Real(1) + Real(w.r) * Real(std::cos(w.phi));
            const Real im = Real(w.r) * Real(std::sin(w.phi));
            numer_ *= re * re + im * im;
        }
    }

    Real power(Real offset) const {
        const Real s = offset + shift_;
        return numer_ / (width_ * width_ + four_kappa_sq_ * s * s);
    }

    PowerAndSlope<Real> power_slope(Real offset) const {
        const Real s = offset + shift_;
        const Real den = width_ * width_ + four_kappa_sq_ * s * s;
        return {numer_ / den, -numer_ * Real(2) * four_kappa_sq_ * s / (den * den)};
    }

private:
    Real width_, shift_, four_kappa_sq_, numer_;
};

namespace detail {

// Bisection on the sign of fn over [lo, hi] (fn(lo) and fn(hi) of opposite
// sign) until the bracket cannot shrink further.
template <class Real, class Fn>
Real bisect(Fn fn, Real lo, Real hi) {
    bool lo_positive = fn(lo) > Real(0);
    for (int k = 0; k < 400; ++k) {
        const Real mid = (lo + hi) / Real(2);
        if (!(mid > lo && mid < hi)) {
            break;
        }
        const Real v = fn(mid);
        if (v == Real(0)) {
            return mid;
        }
        if ((v > Real(0)) == lo_positive) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return (lo + hi) / Real(2);
}

struct ScanRange {
    double center;   // offset the scan is centred on
    double half_width;
    int points;
    double step() const { return 2.0 * half_width / (points - 1); }
    double at(int k) const { return center - half_width + step() * k; }
};

// Root finding with the bracket edges pushed outward by a run-dependent
// fraction of the scan step; used to measure how much the answer moves.
inline double bracket_nudge(int run) {
    static constexpr std::array<double, 3> nudges{0.0, 0.37, 0.61};
    return nudges[static_cast<std::size_t>(run) % nudges.size()];
}

template <class Model, class Real = decltype(std::declval<Model>().power(0.0))>
struct PeakSearchResult {
    Real offset;
    Real height;
    Real left;
    Real right;
    Real baseline;
};

template <class Real, class Model>
PeakSearchResult<Model, Real> search_peak(const Model& model, double gamma_eff, const PeakOptions& opt, int run) {
    ScanRange scan{0.0, opt.scan_half_width * gamma_eff, opt.scan_points};
    std::vector<Real> power(static_cast<std::size_t>(scan.points));
    for (int k = 0; k < scan.points; ++k) {
        power[k] = model.power(Real(scan.at(k)));
    }
    int best = 0;
    for (int k = 1; k < scan.points; ++k) {
        if (power[k] > power[best]) {
            best = k;
        }
    }
    if (best == 0 || best == scan.points - 1) {
        throw NumericalError("no transparency window: |t_p|^2 has no interior maximum near omega1'");
    }

    const double step = scan.step();
    const double nudge = bracket_nudge(run) * step;
    auto slope = [&](Real x) { return model.power_slope(x).slope; };
    Real lo = Real(scan.at(best - 1) - nudge);
    Real hi = Real(scan.at(best + 1) + nudge);
    if (!(slope(lo) > Real(0) && slope(hi) < Real(0))) {
        lo = Real(scan.at(best - 1));
        hi = Real(scan.at(best + 1));
    }
    if (!(slope(lo) > Real(0) && slope(hi) < Real(0))) {
        throw NumericalError("no transparency window: derivative of |t_p|^2 does not change sign at the maximum");
    }
    PeakSearchResult<Model, Real> out;
    out.offset = bisect<Real>(slope, lo, hi);
    out.height = model.power(out.offset);

    if (opt.fwhm_mode == FwhmMode::baseline) {
        const Real far = Real(opt.baseline_distance * gamma_eff);
        out.baseline = (model.power(-far) + model.power(far)) / Real(2);
    } else {
        out.baseline = Real(0);
    }
    const Real level = out.baseline + (out.height - out.baseline) / Real(2);
    auto above = [&](Real x) { return model.power(x) - level; };

    int j = best;
    while (j > 0 && power[j] >= level) {
        --j;
    }
    int m = best;
    while (m < scan.points - 1 && power[m] >= level) {
        ++m;
    }
    if (power[j] >= level || power[m] >= level) {
        throw NumericalError("half-maximum crossing outside the scanned range; widen scan_half_width");
    }
    auto crossing = [&](int outer, int inner, double push) {
        Real a = Real(scan.at(outer) + push);
        const Real b = Real(scan.at(inner));
        if (!(above(a) < Real(0))) {
            a = Real(scan.at(outer));
        }
        return a < b ? bisect<Real>(above, a, b) : bisect<Real>(above, b, a);
    };
    out.left = crossing(j, j + 1, -nudge);
    out.right = crossing(m, m - 1, nudge);
    return out;
}

inline double gamma_eff_of(const WindowParams& w) { return w.gamma1 + 4.0 * w.g * w.g / w.kappa; }

template <class Real, class Result>
PeakMetrics to_metrics(const Result& r, double omega1_prime) {
    PeakMetrics m;
    m.height = static_cast<double>(r.height);
    m.offset = static_cast<double>(r.offset);
    m.omega_max = omega1_prime + m.offset;
    m.fwhm = static_cast<double>(r.right - r.left);
    m.baseline = static_cast<double>(r.baseline);
    return m;
}

} // namespace detail

// Peak of any model exposing power(Real) and power_slope(Real) on the window offset.
template <class Real, class Model>
PeakMetrics peak_metrics(const Model& model, double omega1_prime, double gamma_eff, const PeakOptions& opt = {}) {
    return detail::to_metrics<Real>(detail::search_peak<Real>(model, gamma_eff, opt, 0), omega1_prime);
}

inline PeakMetrics peak_metrics(const WindowParams& w, SpectrumKind kind, const PeakOptions& opt = {}) {
    if (!(w.g > 0.0)) {
        throw NumericalError("no transparency window: g = 0");
    }
    const double ge = detail::gamma_eff_of(w);
    const bool lorentz = kind == SpectrumKind::lorentzian_driven || kind == SpectrumKind::lorentzian_undriven;
    const bool driven = kind == SpectrumKind::lorentzian_driven;
    if (opt.precision == Precision::extended) {
        if (lorentz) {
            return peak_metrics<extended_real>(LorentzianPowerModel<extended_real>(w, driven), w.omega1_prime, ge, opt);
        }
        return peak_metrics<extended_real>(TransmissionModel<extended_real>(w, kind), w.omega1_prime, ge, opt);
    }
    if (lorentz) {
        return peak_metrics<double>(LorentzianPowerModel<double>(w, driven), w.omega1_prime, ge, opt);
    }
    return peak_metrics<double>(TransmissionModel<double>(w, kind), w.omega1_prime, ge, opt);
}

inline PeakMetrics peak_metrics(SpectrumKind kind, const SystemParams& p, const DerivedQuantities& d,
                                const PeakOptions& opt = {}) {
    return peak_metrics(window_params(p, d), kind, opt);
}

struct DeltaTransmission {
    std::function<double(double)> curve;  // omega -> |t_pG|^2 - |t_p0|^2
    double max_value = 0.0;               // signed value at the extremum inside the window
    double argmax = 0.0;                  // rad/s
    double offset = 0.0;                  // argmax - omega1'
};

// |t_pG|^2 - |t_p0|^2 and its extremum of largest magnitude near the window.
inline DeltaTransmission delta_transmission(const WindowParams& w, const PeakOptions& opt = {}) {
    using Real = extended_real;
    const TransmissionModel<Real> driven(w, SpectrumKind::driven);
    const TransmissionModel<Real> undriven(w, SpectrumKind::undriven);
    auto diff = [&](Real x) { return driven.power(x) - undriven.power(x); };
    auto diff_slope = [&](Real x) { return driven.power_slope(x).slope - undriven.power_slope(x).slope; };

    DeltaTransmission out;
    const TransmissionModel<double> dd(w, SpectrumKind::driven);
    const TransmissionModel<double> du(w, SpectrumKind::undriven);
    const double wp = w.omega1_prime;
    out.curve = [dd, du, wp](double omega) { return dd.power(omega - wp) - du.power(omega - wp); };

    const double ge = detail::gamma_eff_of(w);
    detail::ScanRange scan{0.0, opt.scan_half_width * ge, opt.scan_points};
    int best = -1;
    Real best_abs = Real(0);
    for (int k = 0; k < scan.points; ++k) {
        const Real v = diff(Real(scan.at(k)));
        const Real a = abs_real(v);
        if (a > best_abs) {
            best_abs = a;
            best = k;
        }
    }
    if (best < 0) {
        out.argmax = wp;
        return out;
    }
    Real x = Real(scan.at(best));
    if (best > 0 && best < scan.points - 1) {
        const Real lo = Real(scan.at(best - 1));
        const Real hi = Real(scan.at(best + 1));
        if ((diff_slope(lo) > Real(0)) != (diff_slope(hi) > Real(0))) {
            x = detail::bisect<Real>(diff_slope, lo, hi);
        }
    }
    out.offset = static_cast<double>(x);
    out.argmax = wp + out.offset;
    out.max_value = static_cast<double>(diff(x));
    return out;
}

inline DeltaTransmission delta_transmission(const SystemParams& p, const DerivedQuantities& d,
                                            const PeakOptions& opt = {}) {
    return delta_transmission(window_params(p, d), opt);
}

enum class CompareMode { dynamic, static_ };

inline std::string_view compare_mode_name(CompareMode m) { return m == CompareMode::dynamic ? "dynamic" : "static"; }

struct Difference {
    double value = 0.0;
    double bound = 0.0;   // certified numerical error of `value`
    bool below_resolution = false;
};

struct ComparisonReport {
    CompareMode mode = CompareMode::dynamic;
    Precision precision = Precision::extended;
    FwhmMode fwhm_mode = FwhmMode::absolute;
    PeakMetrics first;    // driven (dynamic) or loaded (static)
    PeakMetrics second;   // undriven (dynamic) or unloaded (static)
    Difference delta_height;
    Difference delta_omega_max;  // rad/s
    Difference delta_fwhm;       // rad/s
};

namespace detail {

template <class Real>
ComparisonReport compare_in(const WindowParams& w, CompareMode mode, const PeakOptions& opt) {
    const SpectrumKind first_kind = mode == CompareMode::dynamic ? SpectrumKind::driven : SpectrumKind::undriven;
    const SpectrumKind second_kind = mode == CompareMode::dynamic ? SpectrumKind::undriven : SpectrumKind::unloaded;
    const TransmissionModel<Real> a(w, first_kind);
    const TransmissionModel<Real> b(w, second_kind);
    const double ge = gamma_eff_of(w);

    constexpr int runs = 3;
    std::array<std::array<Real, 3>, runs> deltas{};
    PeakSearchResult<TransmissionModel<Real>, Real> ra{}, rb{};
    for (int run = 0; run < runs; ++run) {
        const auto pa = search_peak<Real>(a, ge, opt, run);
        const auto pb = search_peak<Real>(b, ge, opt, run);
        deltas[run] = {pa.height - pb.height, pa.offset - pb.offset,
                       (pa.right - pa.left) - (pb.right - pb.left)};
        if (run == 0) {
            ra = pa;
            rb = pb;
        }
    }

    ComparisonReport rep;
    rep.mode = mode;
    rep.fwhm_mode = opt.fwhm_mode;
    rep.first = to_metrics<Real>(ra, w.omega1_prime);
    rep.second = to_metrics<Real>(rb, w.omega1_prime);

    // Bound = spread over the perturbed-bracket runs plus a floor of
    // 1e3 ulps of the quantity's natural scale in the working precision,
    // plus 16 double ulps of the value itself since the inputs are doubles.
    const double eps = static_cast<double>(real_traits<Real>::epsilon());
    const double offset_scale = ge + std::abs(rep.first.offset);
    const std::array<double, 3> scales{std::max(rep.first.height, rep.second.height), offset_scale, offset_scale};
    std::array<Difference*, 3> targets{&rep.delta_height, &rep.delta_omega_max, &rep.delta_fwhm};
    for (std::size_t q = 0; q < 3; ++q) {
        Real lo = deltas[0][q];
        Real hi = deltas[0][q];
        for (int run = 1; run < runs; ++run) {
            lo = std::min(lo, deltas[run][q]);
            hi = std::max(hi, deltas[run][q]);
        }
        Difference& dq = *targets[q];
        dq.value = static_cast<double>(deltas[0][q]);
        dq.bound = static_cast<double>(hi - lo) + 1e3 * eps * scales[q] +
                   16.0 * std::numeric_limits<double>::epsilon() * std::abs(dq.value);
        dq.below_resolution = std::abs(dq.value) <= dq.bound;
    }
    return rep;
}

} // namespace detail

// Dynamic: driven minus undriven.  Static: loaded (omega1') minus unloaded
// (omega1) without gravity drive.
inline ComparisonReport compare(CompareMode mode, const WindowParams& w, const PeakOptions& opt = {}) {
    if (!(w.g > 0.0)) {
        throw NumericalError("no transparency window: g = 0");
    }
    ComparisonReport rep = opt.precision == Precision::extended ? detail::compare_in<extended_real>(w, mode, opt)
                                                                : detail::compare_in<double>(w, mode, opt);
    rep.precision = opt.precision;
    return rep;
}

inline ComparisonReport compare(CompareMode mode, const SystemParams& p, const DerivedQuantities& d,
                                const PeakOptions& opt = {}) {
    return compare(mode, window_params(p, d), opt);
}

enum class SweepAxis { kappa, g, Q1, r, phi };

inline std::string_view axis_name(SweepAxis a) {
    switch (a) {
    case SweepAxis::kappa: return "kappa";
    case SweepAxis::g: return "g";
    case SweepAxis::Q1: return "Q1";
    case SweepAxis::r: return "r";
    case SweepAxis::phi: return "phi";
    }
    return "unknown";
}

inline SweepAxis parse_axis(std::string_view name) {
    for (auto a : {SweepAxis::kappa, SweepAxis::g, SweepAxis::Q1, SweepAxis::r, SweepAxis::phi}) {
        if (axis_name(a) == name) {
            return a;
        }
    }
    throw DomainError("unknown sweep axis '" + std::string(name) + "' (kappa, g, Q1, r, phi)");
}

struct SweepPoint {
    double value = 0.0;
    PeakMetrics driven;
    PeakMetrics undriven;
    double delta_tp_max = 0.0;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::r;
    std::vector<double> values;
    std::vector<SweepPoint> points;
};

// One parameter varied with every other window parameter held fixed.
// Q1 rescales gamma1 = omega1 / Q1 with omega1 the unloaded frequency.
inline WindowParams apply_axis(WindowParams w, SweepAxis axis, double value, double omega1) {
    switch (axis) {
    case SweepAxis::kappa: w.kappa = value; break;
    case SweepAxis::g: w.g = value; w.coupling = 2.0 * w.omega1_prime * value * value; break;
    case SweepAxis::Q1: w.gamma1 = omega1 / value; break;
    case SweepAxis::r: w.r = value; break;
    case SweepAxis::phi: w.phi = value; break;
    }
    return w;
}

inline SweepResult sweep(const WindowParams& base, double omega1, SweepAxis axis, const std::vector<double>& values,
                         const PeakOptions& opt = {}) {
    const bool rising = values.size() > 1 && values[1] > values[0];
    for (std::size_t k = 1; k < values.size(); ++k) {
        const bool ok = rising ? values[k] > values[k - 1] : values[k] < values[k - 1];
        if (!ok) {
            throw DomainError("sweep values must be strictly monotone");
        }
    }
    for (double v : values) {
        const bool ok = axis == SweepAxis::phi ? std::isfinite(v) : (axis == SweepAxis::r ? v >= 0.0 : v > 0.0);
        if (!ok) {
            throw DomainError("sweep value out of range for axis " + std::string(axis_name(axis)));
        }
    }
    std::vector<std::future<SweepPoint>> jobs;
    for (double v : values) {
        jobs.push_back(std::async(std::launch::async, [=] {
            const WindowParams w = apply_axis(base, axis, v, omega1);
            SweepPoint pt;
            pt.value = v;
            pt.driven = peak_metrics(w, SpectrumKind::driven, opt);
            pt.undriven = peak_metrics(w, SpectrumKind::undriven, opt);
            pt.delta_tp_max = delta_transmission(w, opt).max_value;
            return pt;
        }));
    }
    SweepResult out;
    out.axis = axis;
    out.values = values;
    for (auto& j : jobs) {
        out.points.push_back(j.get());
    }
    return out;
}

inline SweepResult sweep(const SystemParams& p, const DerivedQuantities& d, SweepAxis axis,
                         const std::vector<double>& values, const PeakOptions& opt = {}) {
    return sweep(window_params(p, d), p.mechanics.omega1, axis, values, opt);
}

} // namespace gravomit

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <future>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

#include "gravomit/error.hpp"
#include "gravomit/params.hpp"
#include "gravomit/perturbation.hpp"
#include "gravomit/response.hpp"

namespace gravomit {

// Brute-force integration of the first-order perturbation equations
//   d2(dx)/dt2 = -omega1'^2 dx - gamma1 d(dx)/dt + hbar G_om (abar* da + abar da*) / M1
//                - (F_G / M1) cos(omega t + phi_s)
//   d(da)/dt   = (i delta_bar - kappa/2) da + i G_om abar dx + sqrt(eta_c kappa) alpha_p exp(-i omega t - i phi_p)
// with the gravity drive locked to the probe frequency.  Displacements are
// carried in units of x_zpf so the state stays of order one.

struct TimeSeries {
    std::vector<double> t;                        // s
    std::vector<double> delta_x1;                 // m
    std::vector<std::complex<double>> delta_a;    // sqrt(photons)
    double dt = 0.0;
    std::uint64_t params_hash = 0;
};

struct IntegrationRequest {
    double omega = 0.0;          // probe (and gravity) angular frequency
    bool probe_on = true;
    bool gravity_on = false;
    double duration = 0.0;       // s
    double dt = 0.0;             // s
    double record_from = 0.0;    // samples with t >= record_from are kept
    std::array<double, 4> initial{};  // dx / x_zpf, its rate, Re da, Im da
};

namespace detail {

using OracleState = std::array<double, 4>;

struct LinearizedSystem {
    double omega1_prime_sq;
    double gamma1;
    double half_kappa;
    double delta_bar;
    std::complex<double> abar;
    double force_coupling;       // hbar G_om / (M1 x_zpf)
    double cavity_coupling;      // G_om x_zpf
    double gravity_accel;        // F_G / (M1 x_zpf), zero when off
    double phi_s;
    std::complex<double> probe;  // sqrt(eta_c kappa) alpha_p exp(-i phi_p), zero when off
    double omega;

    void operator()(const OracleState& x, OracleState& dxdt, double t) const {
        const std::complex<double> da(x[2], x[3]);
        const double phase = omega * t;
        const double radiation = force_coupling * 2.0 * std::real(std::conj(abar) * da);
        dxdt[0] = x[1];
        dxdt[1] = -omega1_prime_sq * x[0] - gamma1 * x[1] + radiation - gravity_accel * std::cos(phase + phi_s);
        const std::complex<double> drive = probe * std::complex<double>(std::cos(phase), -std::sin(phase));
        const std::complex<double> rate = std::complex<double>(-half_kappa, delta_bar) * da +
                                          std::complex<double>(0.0, cavity_coupling * x[0]) * abar + drive;
        dxdt[2] = rate.real();
        dxdt[3] = rate.imag();
    }
};

inline LinearizedSystem make_system(const SystemParams& p, const DerivedQuantities& d, double omega, bool probe_on,
                                    bool gravity_on) {
    LinearizedSystem s;
    s.omega1_prime_sq = d.omega1_prime * d.omega1_prime;
    s.gamma1 = p.mechanics.gamma1;
    s.half_kappa = p.cavity.kappa / 2.0;
    s.delta_bar = d.delta_bar;
    s.abar = std::polar(p.cavity.abar_mag, p.cavity.abar_arg);
    s.force_coupling = constants::hbar * p.cavity.G_om / (p.mechanics.M1 * d.x_zpf);
    s.cavity_coupling = p.cavity.G_om * d.x_zpf;
    s.gravity_accel = gravity_on ? d.F_G / (p.mechanics.M1 * d.x_zpf) : 0.0;
    s.phi_s = p.gravity.phi_s;
    s.probe = probe_on ? std::sqrt(p.cavity.eta_c * p.cavity.kappa) * std::polar(p.probe.alpha_p, -p.probe.phi_p)
                       : std::complex<double>(0.0, 0.0);
    s.omega = omega;
    return s;
}

} // namespace detail

inline TimeSeries integrate(const SystemParams& p, const DerivedQuantities& d, const IntegrationRequest& req) {
    const double fastest = std::max(p.cavity.kappa, d.omega1_prime);
    if (!(req.dt > 0.0) || req.dt >= constants::two_pi / (50.0 * fastest)) {
        throw DomainError("integrate: dt must resolve the fastest scale (dt < 2 pi / (50 max(kappa, omega1')))");
    }
    if (!(req.duration > 0.0)) {
        throw DomainError("integrate: duration must be positive");
    }
    const auto system = detail::make_system(p, d, req.omega, req.probe_on, req.gravity_on);
    boost::numeric::odeint::runge_kutta4<detail::OracleState> stepper;

    const auto steps = static_cast<std::int64_t>(std::llround(req.duration / req.dt));
    TimeSeries out;
    out.dt = req.dt;
    out.params_hash = fingerprint(p);
    const auto first_kept = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(req.record_from / req.dt - 1e-9)));
    if (first_kept <= steps) {
        const auto kept = static_cast<std::size_t>(steps - first_kept + 1);
        out.t.reserve(kept);
        out.delta_x1.reserve(kept);
        out.delta_a.reserve(kept);
    }

    // Envelope bound: a stable linear response stays far below this.
    const double scale = std::abs(system.probe) / system.half_kappa + system.gravity_accel / system.omega1_prime_sq +
                         std::abs(req.initial[0]) + std::abs(req.initial[2]) + std::abs(req.initial[3]) + 1.0;
    const double limit = 1e12 * scale * (1.0 + d.omega1_prime / p.mechanics.gamma1);

    detail::OracleState x = req.initial;
    double max_abs_da = 0.0;
    for (std::int64_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * req.dt;
        const double da_abs = std::hypot(x[2], x[3]);
        max_abs_da = std::max(max_abs_da, da_abs);
        if (!std::isfinite(da_abs) || !std::isfinite(x[0]) || da_abs > limit || std::abs(x[0]) > limit) {
            throw NumericalError("integrate: unstable trajectory at t = " + std::to_string(t) +
                                 " s, max |delta a| = " + std::to_string(max_abs_da));
        }
        if (k >= first_kept) {
            out.t.push_back(t);
            out.delta_x1.push_back(x[0] * d.x_zpf);
            out.delta_a.emplace_back(x[2], x[3]);
        }
        if (k < steps) {
            stepper.do_step(system, x, t, req.dt);
        }
    }
    return out;
}

struct SteadyStateAmplitude {
    double omega = 0.0;
    std::complex<double> amplitude;  // coefficient of exp(-i omega t)
    std::complex<double> mirror;     // coefficient of exp(+i omega t)
    double residual = 0.0;           // power fraction outside the +-omega lines
};

enum class Channel { cavity, displacement };

// Discrete projection over [t_start, t_end), which must hold an integer number
// of periods and at least ten of them.
inline SteadyStateAmplitude demodulate(const TimeSeries& series, double omega, std::pair<double, double> window,
                                       Channel channel = Channel::cavity) {
    const auto [t_start, t_end] = window;
    const double period = constants::two_pi / omega;
    const double periods = (t_end - t_start) / period;
    if (!(periods >= 10.0 - 1e-9)) {
        throw DomainError("demodulate: window shorter than 10 periods");
    }
    if (std::abs(periods - std::round(periods)) > 1e-6) {
        throw DomainError("demodulate: window is not an integer number of periods");
    }
    if (series.t.empty() || t_start < series.t.front() - 0.5 * series.dt ||
        t_end > series.t.back() + 0.5 * series.dt) {
        throw DomainError("demodulate: window outside the recorded series");
    }

    const double t0 = series.t.front();
    const auto first = static_cast<std::size_t>(std::llround((t_start - t0) / series.dt));
    const auto count = static_cast<std::size_t>(std::llround((t_end - t_start) / series.dt));
    if (first + count > series.t.size()) {
        throw DomainError("demodulate: window outside the recorded series");
    }
    if (std::abs(static_cast<double>(count) * series.dt - (t_end - t_start)) > 1e-6 * period) {
        throw DomainError("demodulate: window is not an integer number of samples");
    }

    auto sample = [&](std::size_t k) -> std::complex<double> {
        return channel == Channel::cavity ? series.delta_a[first + k] : std::complex<double>(series.delta_x1[first + k]);
    };
    auto phasor = [&](std::size_t k) {
        const double phase = omega * series.t[first + k];
        return std::complex<double>(std::cos(phase), std::sin(phase));
    };

    std::complex<double> down(0.0, 0.0);
    std::complex<double> up(0.0, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        const auto y = sample(k);
        const auto e = phasor(k);
        down += y * e;
        up += y * std::conj(e);
    }
    const double n = static_cast<double>(count);
    SteadyStateAmplitude out;
    out.omega = omega;
    out.amplitude = down / n;
    out.mirror = up / n;

    double total = 0.0;
    double remainder = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const auto y = sample(k);
        const auto e = phasor(k);
        total += std::norm(y);
        remainder += std::norm(y - out.amplitude * std::conj(e) - out.mirror * e);
    }
    out.residual = total == 0.0 ? 0.0 : remainder / total;
    return out;
}

struct OracleSettings {
    int steps_per_period = 400;
    double ringup_decay_times = 40.0;   // in units of 1 / gamma_eff
    int demod_periods = 200;
    double max_residual = 1e-6;
};

struct OracleRun {
    double omega = 0.0;
    SteadyStateAmplitude cavity;
    SteadyStateAmplitude displacement;
    double dt = 0.0;
    double t_start = 0.0;
};

inline OracleRun run_oracle(const SystemParams& p, const DerivedQuantities& d, double omega, bool probe_on,
                            bool gravity_on, const OracleSettings& s = {}) {
    const double period = constants::two_pi / omega;
    const double ringup = s.ringup_decay_times / d.gamma_eff;
    const double t_start = std::ceil(ringup / period) * period;
    const double t_end = t_start + s.demod_periods * period;

    IntegrationRequest req;
    req.omega = omega;
    req.probe_on = probe_on;
    req.gravity_on = gravity_on;
    req.dt = period / s.steps_per_period;
    req.duration = t_end;
    req.record_from = t_start;
    const TimeSeries series = integrate(p, d, req);

    OracleRun run;
    run.omega = omega;
    run.dt = req.dt;
    run.t_start = t_start;
    run.cavity = demodulate(series, omega, {t_start, t_end}, Channel::cavity);
    run.displacement = demodulate(series, omega, {t_start, t_end}, Channel::displacement);
    return run;
}

// t_p = 1 - sqrt(eta_c kappa) <delta a> / (alpha_p exp(-i phi_p)) at omega.
inline std::complex<double> transmission_from_simulation(const SystemParams& p, const DerivedQuantities& d,
                                                         double omega, bool gravity_on,
                                                         const OracleSettings& s = {}) {
    const OracleRun run = run_oracle(p, d, omega, true, gravity_on, s);
    if (run.cavity.residual > s.max_residual) {
        throw NumericalError("transmission_from_simulation: demodulation residual " +
                             std::to_string(run.cavity.residual) + " above threshold");
    }
    const std::complex<double> input = std::polar(p.probe.alpha_p, -p.probe.phi_p);
    return 1.0 - std::sqrt(p.cavity.eta_c * p.cavity.kappa) * run.cavity.amplitude / input;
}

// Copy of `p` with Q1 replaced and gamma1 rescaled to match.
inline SystemParams with_quality(SystemParams p, double quality) {
    p.mechanics.Q1 = quality;
    p.mechanics.gamma1 = p.mechanics.omega1 / quality;
    return p;
}

struct VerificationEntry {
    std::string check;
    double omega = 0.0;
    std::complex<double> analytic;
    std::complex<double> simulated;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerificationReport {
    double quality = 0.0;
    std::vector<VerificationEntry> entries;
    double max_deviation = 0.0;
    double convergence_ratio = 0.0;   // error(dt) / error(dt / 2)
    double convergence_order = 0.0;
    bool convergence_pass = false;
    bool pass = false;
};

// Window probe frequencies: omega1' + k gamma_eff for k spread over [-3, 3].
inline std::vector<double> verification_frequencies(const DerivedQuantities& d, int count = 10) {
    std::vector<double> out;
    for (int k = 0; k < count; ++k) {
        const double u = count == 1 ? 0.0 : -3.0 + 6.0 * k / (count - 1);
        out.push_back(d.omega1_prime + u * d.gamma_eff);
    }
    return out;
}

// Analytic formulas against the integrator at reduced Q1 (all else as given).
inline VerificationReport verify_oracle(const SystemParams& full, double quality = 1e3, int frequencies = 10,
                                        const OracleSettings& settings = {}) {
    const SystemParams p = with_quality(full, quality);
    const DerivedQuantities d = derive(p);
    VerificationReport report;
    report.quality = quality;
    constexpr double tolerance = 1e-4;

    struct Job {
        std::string check;
        double omega;
        bool gravity_on;
    };
    std::vector<Job> jobs;
    for (double omega : verification_frequencies(d, frequencies)) {
        jobs.push_back({"undriven", omega, false});
        jobs.push_back({"driven", omega, true});
    }
    std::vector<std::future<std::complex<double>>> results;
    for (const auto& job : jobs) {
        results.push_back(std::async(std::launch::async, [&p, &d, job, settings] {
            return transmission_from_simulation(p, d, job.omega, job.gravity_on, settings);
        }));
    }
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        VerificationEntry e;
        e.check = jobs[k].check;
        e.omega = jobs[k].omega;
        e.analytic = jobs[k].gravity_on ? transmission_driven(e.omega, p, d) : transmission_undriven(e.omega, p, d);
        e.simulated = results[k].get();
        e.deviation = std::abs(e.analytic - e.simulated);
        e.tolerance = tolerance;
        e.pass = e.deviation < tolerance;
        report.max_deviation = std::max(report.max_deviation, e.deviation);
        report.entries.push_back(e);
    }

    // Displacement channel with only the gravity drive: -A1' (F_G / M1) e^{-i phi_s}.
    {
        const OracleRun run = run_oracle(p, d, d.omega1_prime, false, true, settings);
        const auto c = coefficients(d.omega1_prime, d.omega1_prime, p, d);
        VerificationEntry e;
        e.check = "gravity_displacement";
        e.omega = d.omega1_prime;
        e.analytic = -c.A1_grav * (d.F_G / p.mechanics.M1) * std::polar(1.0, -p.gravity.phi_s);
        e.simulated = run.displacement.amplitude;
        e.deviation = std::abs(e.analytic - e.simulated) / std::abs(e.analytic);
        e.tolerance = tolerance;
        e.pass = e.deviation < tolerance;
        report.entries.push_back(e);
    }
    // Cavity channel with only the probe: the intracavity coefficient.
    {
        const OracleRun run = run_oracle(p, d, d.omega1_prime, true, false, settings);
        const std::complex<double> input =
            std::sqrt(p.cavity.eta_c * p.cavity.kappa) * std::polar(p.probe.alpha_p, -p.probe.phi_p);
        VerificationEntry e;
        e.check = "probe_intracavity";
        e.omega = d.omega1_prime;
        e.analytic = TransmissionModel<double>(window_params(p, d), SpectrumKind::undriven).intracavity_at_offset(0.0);
        e.simulated = run.cavity.amplitude / input;
        e.deviation = std::abs(e.analytic - e.simulated) / std::abs(e.analytic);
        e.tolerance = tolerance;
        e.pass = e.deviation < tolerance;
        report.entries.push_back(e);
    }

    // Fourth-order convergence from coarse steps, where truncation dominates.
    {
        const double omega = d.omega1_prime + d.gamma_eff;
        const auto exact = transmission_driven(omega, p, d);
        OracleSettings coarse = settings;
        coarse.steps_per_period = 100;
        coarse.max_residual = 1.0;
        OracleSettings fine = coarse;
        fine.steps_per_period = 200;
        const double e1 = std::abs(transmission_from_simulation(p, d, omega, true, coarse) - exact);
        const double e2 = std::abs(transmission_from_simulation(p, d, omega, true, fine) - exact);
        report.convergence_ratio = e1 / e2;
        report.convergence_order = std::log2(report.convergence_ratio);
        report.convergence_pass = std::abs(report.convergence_order - 4.0) < 0.5;
    }

    report.pass = report.convergence_pass &&
                  std::all_of(report.entries.begin(), report.entries.end(), [](const auto& e) { return e.pass; });
    return report;
}

} // namespace gravomit

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <random>

#include "gravomit/analysis.hpp"
#include "gravomit/config.hpp"
#include "gravomit/response.hpp"
#include "support/frozen.hpp"
#include "support/literal_formulas.hpp"

using namespace gravomit;

namespace {

struct Table1 {
    SystemParams p = load_preset("table1");
    DerivedQuantities d = derive(p);
    WindowParams w = window_params(p, d);
};

literal::Inputs literal_inputs(const Table1& t, double r, double phi) {
    return {t.p.mechanics.M1, t.d.omega1_prime, t.p.mechanics.gamma1, constants::hbar, t.p.cavity.G_om,
            t.p.cavity.abar_mag, t.p.cavity.kappa, t.p.cavity.eta_c, t.d.delta_bar, r, phi};
}

} // namespace

TEST_CASE("undriven transmission at omega1' matches the frozen value") {
    const Table1 t;
    const auto tp = transmission_undriven(t.d.omega1_prime, t.p, t.d);
    CHECK(std::abs(tp - std::complex<double>(frozen::tp0_re, frozen::tp0_im)) < 1e-13);
    const auto f = backaction_f(t.d.omega1_prime, t.p, t.d);
    CHECK(std::abs(f - std::complex<double>(frozen::f_re, frozen::f_im)) < 1e-13);
    CHECK(std::abs(susceptibility(t.d.omega1_prime, t.p.mechanics, t.d.omega1_prime)) ==
          doctest::Approx(frozen::chi_abs).epsilon(1e-12));
}

TEST_CASE("window-offset form agrees with the literal omega form") {
    const Table1 t;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> wide(-3.0, 3.0);
    std::uniform_real_distribution<double> narrow(-20.0, 20.0);
    std::uniform_real_distribution<double> phase(-M_PI, M_PI);
    double worst = 0.0;
    for (int k = 0; k < 2000; ++k) {
        const double omega = k % 2 ? t.d.omega1_prime + wide(rng) * t.p.cavity.kappa
                                   : t.d.omega1_prime + narrow(rng) * t.d.gamma_eff;
        const double r = k % 3 ? *t.d.r : 0.3;
        const double phi = phase(rng);
        Table1 v = t;
        v.d.r = r;
        v.d.phi = phi;
        const auto lib = transmission_driven(omega, v.p, v.d);
        const auto lit = literal::transmission(literal_inputs(t, r, phi), omega);
        worst = std::max(worst, static_cast<double>(std::abs(std::complex<long double>(lib) - lit)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("r = 0 makes the driven spectrum identical to the undriven one") {
    Table1 t;
    t.d.r = 0.0;
    t.d.phi = 1.234;
    const auto grid = default_grid(t.p, t.d, 2001);
    const auto zoom = zoom_grid(t.p, t.d);
    for (const auto* g : {&grid, &zoom}) {
        const auto a = evaluate_spectrum(SpectrumKind::driven, *g, t.p, t.d);
        const auto b = evaluate_spectrum(SpectrumKind::undriven, *g, t.p, t.d);
        REQUIRE(a.values.size() == b.values.size());
        for (std::size_t k = 0; k < a.values.size(); ++k) {
            REQUIRE(a.values[k] == b.values[k]);
        }
    }
}

TEST_CASE("susceptibility has conjugate symmetry") {
    const Table1 t;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1.0, 2e5);
    for (int k = 0; k < 1000; ++k) {
        const double w = u(rng);
        const auto a = susceptibility(w, t.p.mechanics, t.d.omega1_prime);
        const auto b = susceptibility(-w, t.p.mechanics, t.d.omega1_prime);
        // rounding of the two denominators, pushed through 1/denominator
        const double slack = 8.0 * DBL_EPSILON * t.p.mechanics.M1 * (w * w + t.d.omega1_prime * t.d.omega1_prime);
        CHECK(std::abs(a - std::conj(b)) <= slack * std::norm(a) + 1e-15 * std::abs(a));
    }
}

TEST_CASE("at omega1' the drive multiplies the response by 1 + r e^{i phi}") {
    Table1 t;
    for (double phi : {0.0, M_PI / 2, -M_PI / 2, M_PI, -M_PI, 0.7}) {
        for (double r : {0.0, 0.0175, 0.05, 0.5}) {
            t.w.r = r;
            t.w.phi = phi;
            const TransmissionModel<double> drv(t.w, SpectrumKind::driven);
            const TransmissionModel<double> und(t.w, SpectrumKind::undriven);
            const auto ratio = drv.at_offset(0.0) / und.at_offset(0.0);
            CHECK(std::abs(ratio - (1.0 + std::polar(r, phi))) < 1e-14);
        }
    }
}

TEST_CASE("peak ratio follows |1 + r e^{i phi}|^2") {
    Table1 t;
    const double h0 = peak_metrics(t.w, SpectrumKind::undriven).height;
    for (double phi : {0.0, M_PI / 2, -M_PI / 2, M_PI, -M_PI}) {
        for (double r : {0.01, 0.0175, 0.05}) {
            t.w.r = r;
            t.w.phi = phi;
            const double hg = peak_metrics(t.w, SpectrumKind::driven).height;
            const double law = std::norm(1.0 + std::polar(r, phi));
            CHECK(std::abs(hg / h0 - law) <= 1e-4 * law);
        }
    }
}

TEST_CASE("closed-form slope matches central differences") {
    const Table1 t;
    for (auto kind : {SpectrumKind::driven, SpectrumKind::undriven, SpectrumKind::unloaded}) {
        const TransmissionModel<extended_real> m(t.w, kind);
        for (double u : {-5.0, -1.0, -0.1, 0.0, 0.3, 2.0, 7.0}) {
            const extended_real x = u * t.d.gamma_eff;
            const extended_real h = 1e-9;
            const extended_real fd = (m.power(x + h) - m.power(x - h)) / (2 * h);
            const extended_real exact = m.power_slope(x).slope;
            CHECK(static_cast<double>(abs_real(fd - exact)) < 1e-10 * std::max(1.0, std::abs(double(exact))));
        }
    }
}

TEST_CASE("Lorentzian form tracks the full response inside the window") {
    const Table1 t;
    double worst = 0.0;
    for (bool driven : {false, true}) {
        const TransmissionModel<double> full(t.w, driven ? SpectrumKind::driven : SpectrumKind::undriven);
        for (int k = -2000; k <= 2000; ++k) {
            const double x = 5.0 * t.d.gamma_eff * k / 2000.0;
            const double exact = full.power(x);
            worst = std::max(worst, std::abs(lorentzian_power(x, t.w, driven) - exact) / exact);
            const double complex_form = std::norm(lorentzian_transmission(x, t.w, driven));
            CHECK(std::abs(complex_form - lorentzian_power(x, t.w, driven)) <= 1e-12 * exact);
        }
    }
    CHECK(worst == doctest::Approx(frozen::lorentzian_max_error).epsilon(1e-6));
    CHECK(worst < frozen::lorentzian_threshold);
    CHECK(lorentzian_fwhm(t.w) == doctest::Approx(frozen::lorentzian_fwhm).epsilon(1e-14));
}

TEST_CASE("Lorentzian form refuses configurations outside its validity") {
    Table1 t;
    t.w.eta_c = 0.4;
    CHECK_THROWS_WITH_AS(lorentzian_power(0.0, t.w, false), doctest::Contains("approximation conditions not met"),
                         DomainError);
    t = Table1{};
    t.w.delta_bar *= 1.01;
    CHECK_THROWS_AS(lorentzian_transmission(0.0, t.w, true), DomainError);
}

TEST_CASE("unloaded differs from loaded only through the gravitational spring") {
    Table1 t;
    const TransmissionModel<double> loaded(t.w, SpectrumKind::undriven);
    const TransmissionModel<double> unloaded(t.w, SpectrumKind::unloaded);
    CHECK(loaded.at_offset(0.0) != unloaded.at_offset(0.0));
    t.w.spring_offset = 0.0;
    const TransmissionModel<double> same(t.w, SpectrumKind::unloaded);
    CHECK(loaded.at_offset(0.01) == same.at_offset(0.01));
}

TEST_CASE("grids") {
    const Table1 t;
    const auto g = default_grid(t.p, t.d);
    CHECK(g.size() == 4001);
    CHECK(g.front() == doctest::Approx(-t.d.delta_bar - 3 * t.p.cavity.kappa));
    CHECK(g.back() == doctest::Approx(-t.d.delta_bar + 3 * t.p.cavity.kappa));
    CHECK(g[2000] == doctest::Approx(t.d.omega1_prime).epsilon(1e-15));
    const auto z = zoom_grid(t.p, t.d);
    CHECK((z.back() - z.front()) == doctest::Approx(6 * t.p.cavity.kappa * 5e-7));
    CHECK_THROWS_AS(evaluate_spectrum(SpectrumKind::oracle, g, t.p, t.d), DomainError);
    CHECK(evaluate_spectrum(SpectrumKind::undriven, g, t.p, t.d).params_hash == fingerprint(t.p));
}

TEST_CASE("dense scan of the driven-undriven difference") {
    const Table1 t;
    const TransmissionModel<double> drv(t.w, SpectrumKind::driven);
    const TransmissionModel<double> und(t.w, SpectrumKind::undriven);
    constexpr int points = 10'000'000;
    const double half = 10.0 * t.d.gamma_eff;
    double best = 0.0;
    double best_x = 0.0;
    for (int k = 0; k < points; ++k) {
        const double x = -half + 2.0 * half * k / (points - 1);
        const double v = drv.power(x) - und.power(x);
        if (std::abs(v) > std::abs(best)) {
            best = v;
            best_x = x;
        }
    }
    CHECK(best == doctest::Approx(frozen::delta_max).epsilon(1e-12));
    CHECK(std::abs(best_x - frozen::delta_max_offset) < 4.0 * half / points + 1e-6);
    const auto refined = delta_transmission(t.w);
    CHECK(refined.max_value >= best - 1e-15);
    CHECK(refined.max_value == doctest::Approx(frozen::delta_max).epsilon(1e-14));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gravomit/config.hpp"
#include "gravomit/perturbation.hpp"

using namespace gravomit;

namespace {

struct Table1 {
    SystemParams p = load_preset("table1");
    DerivedQuantities d = derive(p);
};

} // namespace

TEST_CASE("coefficients solve the first-order system at random frequencies") {
    const Table1 t;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> wide(-3.0, 3.0);
    std::uniform_real_distribution<double> window(-10.0, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double omega = t.d.omega1_prime + (k % 2 ? wide(rng) * t.p.cavity.kappa : window(rng) * t.d.gamma_eff);
        const double omega_s = t.d.omega1_prime + (k % 3 ? window(rng) * t.d.gamma_eff : wide(rng) * t.p.cavity.kappa);
        const auto c = coefficients(omega, omega_s, t.p, t.d);
        for (double res : residuals(omega, omega_s, c, t.p, t.d)) {
            worst = std::max(worst, res);
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("the probe coefficient B reproduces the undriven transmission") {
    const Table1 t;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const double loss = t.p.cavity.eta_c * t.p.cavity.kappa;
    for (int k = 0; k < 200; ++k) {
        const double omega = t.d.omega1_prime + u(rng) * (k % 2 ? t.p.cavity.kappa : 10.0 * t.d.gamma_eff);
        const auto c = coefficients(omega, omega, t.p, t.d);
        CHECK(std::abs(1.0 - loss * c.B - transmission_undriven(omega, t.p, t.d)) < 1e-13);
    }
}

TEST_CASE("the C'* expression as printed does not solve the system") {
    const Table1 t;
    const double omega_s = t.d.omega1_prime + 0.3 * t.d.gamma_eff;
    auto c = coefficients(omega_s, omega_s, t.p, t.d);
    const auto good = residuals(omega_s, omega_s, c, t.p, t.d);
    const double corrected = *std::max_element(good.begin() + 4, good.end());
    c.C_grav_conj = printed_c_grav_conj(omega_s, t.p, t.d);
    const auto res = residuals(omega_s, omega_s, c, t.p, t.d);
    CHECK(corrected < 1e-14);
    // its own cavity equation fails outright
    CHECK(res[7] > 0.5);
    // and the mechanical equations pick up about 4e-8
    CHECK(res[4] > 1e-9);
    CHECK(res[4] < 1e-6);
    CHECK(res[6] > 1e-9);
}

TEST_CASE("lower sideband is not small for the table1 set") {
    const Table1 t;
    const auto ratio = lower_sideband_ratio(t.d.omega1_prime, t.p, t.d);
    CHECK(ratio.coefficient_ratio == doctest::Approx(0.7145).epsilon(1e-3));
    CHECK(ratio.output_ratio == doctest::Approx(0.2425).epsilon(1e-3));
}

TEST_CASE("pump settings round-trip through the stationary solution") {
    const Table1 t;
    const auto pump = pump_for_target(t.p.cavity.abar_mag, t.p.cavity.abar_arg, t.d.delta_bar, t.p, t.d.omega1_prime);
    const auto s = stationary_solution(pump.alpha_l, pump.phi_l, pump.delta, t.p, t.d.omega1_prime);
    CHECK(std::abs(s.a_bar) == doctest::Approx(t.p.cavity.abar_mag).epsilon(1e-13));
    CHECK(std::abs(std::arg(s.a_bar) - t.p.cavity.abar_arg) < 1e-12);
    CHECK(s.delta_bar == doctest::Approx(t.d.delta_bar).epsilon(1e-14));
    CHECK(s.iterations < 20);

    Table1 other;
    const double arg = 0.8;
    const auto pump2 = pump_for_target(250.0, arg, -1.2 * t.d.omega1_prime, other.p, other.d.omega1_prime);
    const auto s2 = stationary_solution(pump2.alpha_l, pump2.phi_l, pump2.delta, other.p, other.d.omega1_prime);
    CHECK(std::abs(s2.a_bar) == doctest::Approx(250.0).epsilon(1e-12));
    CHECK(std::arg(s2.a_bar) == doctest::Approx(arg).epsilon(1e-12));
}

TEST_CASE("force decomposition") {
    const Table1 t;
    const auto at_window = force_decomposition(-t.d.delta_bar, t.p, t.d);
    CHECK(at_window.k_p == std::complex<double>(0.0, 0.0));
    CHECK(at_window.F_G / at_window.F_p == *t.d.r);
    CHECK(at_window.F_G == t.d.F_G);
    CHECK(at_window.phi_G == doctest::Approx(t.d.phi_G));
    CHECK(at_window.phi_fp == doctest::Approx(t.d.phi_fp));
    CHECK(wrap_phase(at_window.phi_fp - at_window.phi_G) == doctest::Approx(t.d.phi));

    const auto off = force_decomposition(-t.d.delta_bar + 0.2 * t.p.cavity.kappa, t.p, t.d);
    CHECK(std::abs(off.k_p) > 0.0);
    // away from omega = -delta_bar the optical spring is purely real
    CHECK(std::abs(off.k_p.imag()) <= 1e-15 * std::abs(off.k_p.real()));
    // the window-centre probe force equals F_p
    CHECK(probe_force_amplitude(t.d.omega1_prime, t.p, t.d) == doctest::Approx(t.d.F_p).epsilon(1e-14));
}

TEST_CASE("stationary solution reports non-convergence") {
    Table1 t;
    t.p.cavity.G_om *= 1e12;
    CHECK_THROWS_AS(stationary_solution(1e20, 0.0, 0.0, t.p, t.d.omega1_prime), NumericalError);
}

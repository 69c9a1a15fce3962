#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gravomit/config.hpp"
#include "gravomit/params.hpp"
#include "support/frozen.hpp"

using namespace gravomit;

namespace {

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

} // namespace

TEST_CASE("table1 derived scalars match the frozen reference") {
    const auto p = load_preset("table1");
    const auto d = derive(p);
    CHECK(close_rel(d.omega1_shift, frozen::omega_shift, 1e-12));
    CHECK(close_rel(d.x_zpf, frozen::x_zpf, 1e-14));
    CHECK(close_rel(d.g, frozen::g, 1e-14));
    CHECK(close_rel(d.F_G, frozen::F_G, 1e-14));
    CHECK(close_rel(d.F_p, frozen::F_p, 1e-14));
    CHECK(close_rel(d.force_ratio(), frozen::r, 1e-14));
    CHECK(close_rel(d.gamma_eff, frozen::gamma_eff, 1e-14));
    CHECK(close_rel(d.n_bar_1, frozen::n_bar_1, 1e-12));
    CHECK(close_rel(d.n_bar_p, frozen::n_bar_p, 1e-12));
    CHECK(close_rel(d.n_bar_p_angular, frozen::n_bar_p_angular, 1e-12));
    CHECK(close_rel(prestressed_frequency(*p.membrane) / constants::two_pi, frozen::prestressed_hz, 1e-14));
    CHECK(d.delta_bar == -d.omega1_prime);
    CHECK(d.phi == 0.0);
}

TEST_CASE("tabulated values are reproduced at their stated precision") {
    const auto p = load_preset("table1");
    const auto d = derive(p);
    CHECK(close_rel(d.F_G, 6.4e-18, 0.02));
    CHECK(close_rel(d.F_p, 365.5e-18, 0.02));
    CHECK(close_rel(*d.r, 1.75e-2, 0.02));
    CHECK(close_rel(d.x_zpf, 2.9e-17, 0.02));
    CHECK(close_rel(d.g, 14.4, 0.01));
    CHECK(close_rel(prestressed_frequency(*p.membrane) / constants::two_pi, 249.6e3, 0.01));
    CHECK(d.n_bar_p >= 50.0);
    CHECK(d.n_bar_p <= 500.0);
    CHECK(d.snr_shot >= 7.0);
    CHECK(d.snr_shot <= 22.0);
}

TEST_CASE("omega1 shift agrees with the direct difference") {
    const auto d = derive(load_preset("table1"));
    const auto p = load_preset("table1");
    CHECK(std::abs(d.omega1_prime - p.mechanics.omega1 - d.omega1_shift) < 4.0 * 7.3e-12);
    CHECK(d.omega1_shift < 0.0);
}

TEST_CASE("wrap_phase lands in (-pi, pi] and preserves the angle") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int k = 0; k < 10000; ++k) {
        const double a = u(rng);
        const double w = wrap_phase(a);
        REQUIRE(w > -constants::pi);
        REQUIRE(w <= constants::pi);
        CHECK(std::abs(std::remainder(a - w, constants::two_pi)) < 1e-12);
    }
    CHECK(wrap_phase(-constants::pi) == doctest::Approx(constants::pi));
    CHECK(wrap_phase(constants::pi) == doctest::Approx(constants::pi));
}

TEST_CASE("phonon occupancy is zero at T = 0 and increases with T") {
    const double w = constants::two_pi * 8e3;
    CHECK(phonon_occupancy(0.0, w) == 0.0);
    double last = 0.0;
    for (double T = 1e-9; T < 10.0; T *= 1.7) {
        const double n = phonon_occupancy(T, w);
        CHECK(n >= last);
        last = n;
    }
    // high temperature: k_B T / hbar omega - 1/2
    const double T = 300.0;
    const double classical = constants::k_boltzmann * T / (constants::hbar * w) - 0.5;
    CHECK(close_rel(phonon_occupancy(T, w), classical, 1e-9));
    CHECK_THROWS_AS(phonon_occupancy(-1.0, w), DomainError);
}

TEST_CASE("F_G scaling laws") {
    const auto base = load_preset("table1");
    const double F0 = derive(base).F_G;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.3, 1.9);
    for (int k = 0; k < 200; ++k) {
        const double s = u(rng);
        auto p = base;
        p.gravity.x_s *= s;
        CHECK(close_rel(derive(p).F_G, F0 * s, 1e-12));
        p = base;
        p.gravity.M2 *= s;
        CHECK(close_rel(derive(p).F_G, F0 * s, 1e-12));
        p = base;
        p.mechanics.M1 *= s;
        CHECK(close_rel(derive(p).F_G, F0 * s, 1e-12));
        p = base;
        p.gravity.d *= s;
        p.gravity.allow_large_amplitude = true;
        CHECK(close_rel(derive(p).F_G, F0 / (s * s * s), 1e-12));
    }
}

TEST_CASE("r vanishes with the source amplitude and is empty without a probe") {
    auto p = load_preset("table1");
    p.gravity.x_s = 0.0;
    CHECK(derive(p).force_ratio() == 0.0);
    p = load_preset("table1");
    p.probe.P_p = 0.0;
    p.probe.alpha_p = 0.0;
    const auto d = derive(p);
    CHECK_FALSE(d.r.has_value());
    CHECK_THROWS_AS(d.force_ratio(), DomainError);
}

TEST_CASE("validation names the offending field") {
    auto p = load_preset("table1");
    p.mechanics.M1 = -1.0;
    try {
        validate(p);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("mechanics.M1", 0) == 0);
    }
    p = load_preset("table1");
    p.gravity.x_s = 0.2 * p.gravity.d;
    try {
        validate(p);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("drive amplitude too large") != std::string::npos);
    }
    p.gravity.allow_large_amplitude = true;
    CHECK_NOTHROW(validate(p));

    p = load_preset("table1");
    p.mechanics.Q1 *= 1.01;
    CHECK_THROWS_AS(validate(p), ConfigError);
    p = load_preset("table1");
    p.probe.alpha_p *= 1.001;
    CHECK_THROWS_AS(validate(p), ConfigError);
    p = load_preset("table1");
    p.cavity.eta_c = 1.5;
    CHECK_THROWS_AS(validate(p), ConfigError);
}

TEST_CASE("gravitational spring stronger than the mechanics is a domain error") {
    auto p = load_preset("table1");
    p.gravity.M2 = 1e12;
    CHECK_THROWS_AS(derive(p), DomainError);
}

TEST_CASE("without gravity omega1' equals omega1 exactly") {
    auto p = load_preset("table1");
    p.gravity.M2 = 0.0;
    const auto d = derive(p);
    CHECK(d.omega1_prime == p.mechanics.omega1);
    CHECK(d.omega1_shift == 0.0);
    CHECK(d.F_G == 0.0);
}

TEST_CASE("fingerprint reacts to every input") {
    const auto base = load_preset("table1");
    const auto h0 = fingerprint(base);
    CHECK(fingerprint(load_preset("table1")) == h0);
    auto p = base;
    p.cavity.kappa = std::nextafter(p.cavity.kappa, 1e9);
    CHECK(fingerprint(p) != h0);
    p = base;
    p.environment.T *= 2.0;
    CHECK(fingerprint(p) != h0);
    p = base;
    p.membrane.reset();
    CHECK(fingerprint(p) != h0);
    p = base;
    p.environment.S_x_ext = ExternalNoise(std::vector<std::pair<double, double>>{{0.0, 0.0}, {1.0, 0.0}});
    CHECK(fingerprint(p) != h0);
}

TEST_CASE("external noise table interpolates and clamps") {
    const ExternalNoise n(std::vector<std::pair<double, double>>{{2.0, 4.0}, {0.0, 0.0}});
    CHECK(n.at(-1.0) == 0.0);
    CHECK(n.at(1.0) == doctest::Approx(2.0));
    CHECK(n.at(5.0) == 4.0);
    CHECK(n.min_value() == 0.0);
    CHECK(ExternalNoise(3.0).at(123.0) == 3.0);
}

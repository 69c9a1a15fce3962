// Headline numbers for the table1 parameter set, or for a config file given
// as the first argument.
#include <cstdio>
#include <string>

#include "gravomit/gravomit.hpp"

int main(int argc, char** argv) {
    using namespace gravomit;
    try {
        const SystemParams p = argc > 1 ? load_config_file(argv[1]) : load_preset("table1");
        const DerivedQuantities d = derive(p);
        const auto delta = delta_transmission(p, d);
        const auto dyn = compare(CompareMode::dynamic, p, d);
        const auto stat = compare(CompareMode::static_, p, d);
        const auto noise = noise_budget(d.omega1_prime, p, d);

        std::printf("omega1'/2pi         %.6f Hz\n", d.omega1_prime / constants::two_pi);
        std::printf("g                   %.4g rad/s\n", d.g);
        std::printf("F_G, F_p            %.4g N, %.4g N (r = %.4g)\n", d.F_G, d.F_p, d.r.value_or(0.0));
        std::printf("max d|t_p|^2        %.6g at omega1' %+.4g rad/s\n", delta.max_value, delta.offset);
        std::printf("dynamic  d|t|^2     %.4g  d omega_max %.4g  d fwhm %.4g rad/s\n", dyn.delta_height.value,
                    dyn.delta_omega_max.value, dyn.delta_fwhm.value);
        std::printf("static   d|t|^2     %.4g  d omega_max %.4g  d fwhm %.4g rad/s\n", stat.delta_height.value,
                    stat.delta_omega_max.value, stat.delta_fwhm.value);
        std::printf("S_eff, tau          %.4g N^2/Hz, %.4g s\n", noise.s_eff, noise.tau_seconds);
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    return 0;
}

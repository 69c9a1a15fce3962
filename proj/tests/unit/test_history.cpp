#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gravomit/history.hpp"

using namespace gravomit;

TEST_CASE("embedded table matches the data file") {
    std::ifstream in(std::string(GRAVOMIT_SOURCE_DIR) + "/data/history_tables.csv", std::ios::binary);
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == std::string(history_csv()));
    CHECK(fnv1a(history_csv()) == history_checksum);
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
}

TEST_CASE("row counts and spot values") {
    const auto& rows = history_records();
    const auto grav = filter_history({HistoryCategory::gravity_experiment, {}, {}});
    const auto opto = filter_history({HistoryCategory::optomechanics_resonator, {}, {}});
    CHECK(grav.size() == gravity_row_count);
    CHECK(opto.size() == resonator_row_count);
    CHECK(rows.size() == gravity_row_count + resonator_row_count);

    CHECK(grav.front().author == "H. Cavendish");
    CHECK(grav.front().year == 1798);
    CHECK(grav.front().mass_kg == 316.0);
    const auto& westphal = grav[46];
    CHECK(westphal.index == 47);
    CHECK(westphal.author == "Westphal et al.");
    CHECK(westphal.mass_kg == 9.2e-5);
    CHECK(westphal.year == 2021);
    CHECK(westphal.material == "Gold");
}

TEST_CASE("table invariants") {
    int last_index[2] = {0, 0};
    for (const auto& r : history_records()) {
        auto& li = last_index[static_cast<int>(r.category)];
        CHECK(r.index == li + 1);
        li = r.index;
        CHECK(r.mass_kg > 0.0);
        CHECK(r.year >= 1790);
        CHECK(r.year <= 2025);
        CHECK_FALSE(r.author.empty());
        if (r.category == HistoryCategory::gravity_experiment) {
            CHECK_FALSE(r.omega_m_over_2pi_mhz.has_value());
            CHECK_FALSE(r.Q_m.has_value());
        } else {
            CHECK_FALSE(r.G_value.has_value());
            CHECK(r.omega_m_over_2pi_mhz.has_value());
        }
    }
}

TEST_CASE("filters") {
    const auto recent = filter_history({HistoryCategory::optomechanics_resonator, 2021, {}});
    REQUIRE_FALSE(recent.empty());
    for (const auto& r : recent) CHECK(r.year >= 2021);
    CHECK(std::any_of(recent.begin(), recent.end(),
                      [](const auto& r) { return r.author == "Liu et al." && r.mass_kg == 1.26e-6; }));
    const auto window = filter_history({{}, 1900, 1950});
    for (const auto& r : window) {
        CHECK(r.year >= 1900);
        CHECK(r.year <= 1950);
    }
    CHECK(filter_history({{}, 2030, {}}).empty());
}

TEST_CASE("mass scales first overlap in 2021") {
    CHECK(first_overlap_year() == 2021);
    const auto series = overlap_series();
    for (std::size_t k = 1; k < series.size(); ++k) {
        CHECK(series[k].year > series[k - 1].year);
        if (series[k - 1].min_source_mass) CHECK(*series[k].min_source_mass <= *series[k - 1].min_source_mass);
        if (series[k - 1].max_resonator_mass) CHECK(*series[k].max_resonator_mass >= *series[k - 1].max_resonator_mass);
    }
    const auto at = std::find_if(series.begin(), series.end(), [](const auto& p) { return p.year == 2021; });
    REQUIRE(at != series.end());
    CHECK(at->overlap);
    CHECK(*at->min_source_mass == 9.2e-5);
    CHECK(*at->max_resonator_mass <= 1e-3);
    CHECK_FALSE(std::prev(at)->overlap);
}

TEST_CASE("parse errors") {
    const std::string head =
        "category,index,author,mass_kg,material,geometry,year,G_1e-11_SI,dG_over_G_ppm,omega_m_over_2pi_MHz,Q_m,T_K\n";
    CHECK(parse_history_csv(head).empty());
    CHECK(parse_history_csv(head + "gravity_experiment,1,A,\"1.0\",\"Ag, Cu\",Sphere,1900,,,,,\n").front().material ==
          "Ag, Cu");
    CHECK_THROWS_AS(parse_history_csv(head + "gravity_experiment,1,A,1,x,y,1900\n"), ConfigError);
    CHECK_THROWS_AS(parse_history_csv(head + "mystery,1,A,1,x,y,1900,,,,,\n"), ConfigError);
    CHECK_THROWS_AS(parse_history_csv(head + "gravity_experiment,1,A,-1,x,y,1900,,,,,\n"), ConfigError);
    CHECK_THROWS_AS(parse_history_csv(head + "gravity_experiment,1,A,1,x,y,1700,,,,,\n"), ConfigError);
    CHECK_THROWS_AS(parse_history_csv(head + "gravity_experiment,1,A,heavy,x,y,1900,,,,,\n"), ConfigError);
}

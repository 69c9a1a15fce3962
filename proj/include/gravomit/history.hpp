#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gravomit/error.hpp"

namespace gravomit {

enum class HistoryCategory { gravity_experiment, optomechanics_resonator };

inline std::string_view category_name(HistoryCategory c) {
    return c == HistoryCategory::gravity_experiment ? "gravity_experiment" : "optomechanics_resonator";
}

struct HistoricalRecord {
    HistoryCategory category = HistoryCategory::gravity_experiment;
    int index = 0;  // row number within its table
    std::string author;
    double mass_kg = 0.0;  // source mass, or resonator effective mass
    std::string material;
    std::string geometry;  // resonator type for optomechanics rows
    int year = 0;
    // gravity rows
    std::optional<double> G_value;  // 1e-11 m^3 s^-2 kg^-1
    std::optional<double> dG_ppm;
    // optomechanics rows
    std::optional<double> omega_m_over_2pi_mhz;
    std::optional<double> Q_m;
    std::optional<double> T_kelvin;
};

inline constexpr std::size_t gravity_row_count = 48;
inline constexpr std::size_t resonator_row_count = 55;
inline constexpr std::uint64_t history_checksum = 0x40414bf388a1f8d7ull;

// Same bytes as data/history_tables.csv.
inline std::string_view history_csv() {
    static constexpr std::string_view text = R"history(category,index,author,mass_kg,material,geometry,year,G_1e-11_SI,dG_over_G_ppm,omega_m_over_2pi_MHz,Q_m,T_K
gravity_experiment,1,H. Cavendish,316,Lead,Sphere,1798,6.754,6000,,,
gravity_experiment,2,F. Reich,90,Lead,Spheres,1838,6.64,4283,,,
gravity_experiment,3,P. Von Jolly,5775,Lead,Sphere,1881,6.447,17000,,,
gravity_experiment,4,J. Wilsing,650,Cast iron,Cylinders,1889,6.594,2275,,,
gravity_experiment,5,J. H. Poynting,150,Lead,Sphere,1891,6.698,5970,,,
gravity_experiment,6,C. V. Boys,14.8,Lead,Spheres,1895,6.658,1051,,,
gravity_experiment,7,R. Eötvös,600,Lead,Rect. block,1896,6.657,1953,,,
gravity_experiment,8,C. Braun,18.0,Mercury,Spheres,1897,6.658,300,,,
gravity_experiment,9,Richarz et al.,100000,Lead,Rect. block,1897,6.683,645,,,
gravity_experiment,10,G. K. Burgess,20,Lead,Spheres,1899,6.64,6024,,,
gravity_experiment,11,J. Zahradníček,23,Lead,Spheres,1933,6.659,6006,,,
gravity_experiment,12,Heyl et al.,132,Tool steel,Cylinders,1942,6.673,615,,,
gravity_experiment,13,A. H. Cook,1000,CuAl alloy,Cyl.assy,1968,,,,,
gravity_experiment,14,Rose et al.,10.49,Tungsten,Spheres,1969,6.674,1798,,,
gravity_experiment,15,Y. Renner,35,Mercury,Cylinders,1970,6.670,1199,,,
gravity_experiment,16,C. Pontikis,3.0,"Ag, Cu, Pb, Hg",Spheres,1972,6.6714,90,,,
gravity_experiment,17,W. Koldewyn A.,97,Bronze,Axial doughnut,1976,6.575,25875,,,
gravity_experiment,18,Sagitov et al.,80,Stainless steel,Cylinders,1979,6.6745,120,,,
gravity_experiment,19,Luther et al.,21,Tungsten,Spheres,1982,6.6726,75,,,
gravity_experiment,20,C. C. Speake,9.2,Brass,Cylinder,1983,6.65,34587,,,
gravity_experiment,21,Liu et al.,8.7,Brass,Cylinder,1987,6.660,3605,,,
gravity_experiment,22,Dousse et al.,20,Lead,Spheres,1987,6.6722,764,,,
gravity_experiment,23,Saulnier et al.,6.1,Uranium,Polygons,1989,6.65,13534,,,
gravity_experiment,24,Ritter et al.,0.09,DyFe,Cylinders,1990,6.67,23988,,,
gravity_experiment,25,Yang et al.,48224,Water,Cyl. tank,1991,6.672,9967,,,
gravity_experiment,26,Michaelis et al.,0.24,Zerodur,Cylinders,1995,6.7174,298,,,
gravity_experiment,27,Michaelis et al.,1.8,Tungsten,Cylinders,1995,6.7154,83,,,
gravity_experiment,28,Luo et al.,6.25,Stainless steel,Cylinders,1998,6.6699,105,,,
gravity_experiment,29,Schwarz et al.,521,Tungsten alloy,Cyl. assy,1999,6.6873,1406,,,
gravity_experiment,30,Nolting et al.,1000,Water,Cyl. tank,1999,6.6754,220,,,
gravity_experiment,31,Gundlach et al.,33,Stainless steel,Sph. assy,2000,6.674215,14,,,
gravity_experiment,32,Quinn et al.,46,Cu 0.7% Te,Cylinders,2001,6.67559,41,,,
gravity_experiment,33,U. Kleinvoß,1152,Brass,Cylinders,2002,6.67422,150,,,
gravity_experiment,34,Armstrong et al.,54,Cu and stainless steel,Cylinders,2003,6.67387,41,,,
gravity_experiment,35,Baldi et al.,281,Stainless steel,Cylinder,2005,6.675,1048,,,
gravity_experiment,36,Hu et al.,12.5,Stainless steel,Cylinders,2005,6.6723,130,,,
gravity_experiment,37,Schlamminger et al.,13520,Smercury,Cyl. tank,2006,6.674252,18,,,
gravity_experiment,38,Fixler et al.,540,Lead,Axial doughnut,2007,6.693,5110,,,
gravity_experiment,39,Lamporesi et al.,516,Tungsten,Cylinders,2008,6.667,1710,,,
gravity_experiment,40,Luo et al.,6.15,Stainless steel,Spheres,2009,6.67349,27,,,
gravity_experiment,41,Tu et al.,1.6,Stainless steel,Spheres,2010,6.67349,26,,,
gravity_experiment,42,Parks et al.,480,Tungsten,Cyl. assy,2010,6.67234,21,,,
gravity_experiment,43,Quinn et al.,45,Cu 0.7% Te,Cylinders,2013,6.67545,27,,,
gravity_experiment,44,Rosi et al.,516,Tungsten alloy,Cylinders,2014,6.67191,150,,,
gravity_experiment,45,Newman et al.,59,Copper,Rings,2014,6.67433,19,,,
gravity_experiment,46,Li et al.,0.778,Stainless steel,Spheres,2018,6.674484,12,,,
gravity_experiment,47,Westphal et al.,9.2e-5,Gold,Sphere,2021,6.04,9934,,,
gravity_experiment,48,Brack et al.,3.88,Tungsten,Beam,2022,6.82,16129,,,
optomechanics_resonator,1,Metzger et al.,8.6e-12,,Mirror,2004,,,7.30e-3,2e3,295
optomechanics_resonator,2,Arcizet et al.,1.9e-7,,Mirror,2006,,,0.815,1e4,295
optomechanics_resonator,3,Kleckner et al.,2.4e-11,,Mirror,2006,,,1.25e-2,1.37e3,295
optomechanics_resonator,4,Gigan et al,9.0e-12,,Mirror,2006,,,0.278,9e3,295
optomechanics_resonator,5,Arcizet et al.,1.9e-6,,Mirror,2006,,,0.814,1e4,295
optomechanics_resonator,6,Schliesser et al.,1.5e-11,,Toroidal Microresonator,2006,,,57.8,2.89e3,300
optomechanics_resonator,7,Corbitt et al.,1.0e-3,,Mirror,2007,,,1.72e-4,3.2e3,295
optomechanics_resonator,8,Corbitt et al.,1.0e-3,,Mirror,2007,,,1.27e-5,1.995e4,295
optomechanics_resonator,9,Favero et al,1.1e-14,,Mirror,2007,,,0.547,1.059e3,300
optomechanics_resonator,10,Caniard et al.,7.4e-4,,Mirror,2007,,,0.711,1.6e4,295
optomechanics_resonator,11,Thompson et al.,3.9e-11,,Beam or membrane,2008,,,0.134,1.1e6,294
optomechanics_resonator,12,Gröblacher et al.,4.0e-11,,Mirror,2008,,,0.557,2e3,35
optomechanics_resonator,13,Mow-Lowry et al.,6.9e-4,,Mirror,2008,,,8.48e-5,4.45e4,300
optomechanics_resonator,14,Schliesser et al.,1.0e-11,,Toroidal Microresonator,2008,,,74.0,5.7e4,295
optomechanics_resonator,15,Regal et al.,2.0e-15,,Superconducting Circuit,2008,,,0.237,2.3e3,0.040
optomechanics_resonator,16,Liu et al.,2.0e-17,,Mirror,2008,,,1040,1.8e2,295
optomechanics_resonator,17,Li et al.,1.3e-15,,Photonic Crystal,2008,,,8.87,1.85e3,295
optomechanics_resonator,18,Teufel et al.,6.2e-15,,Beam or membrane,2008,,,1.53,3e5,0.050
optomechanics_resonator,19,Gröblacher,4.3e-11,,Mirror,2009,,,0.945,3e4,5.3
optomechanics_resonator,20,Schliesser et al.,7.0e-11,,Toroidal Microresonator,2009,,,65.0,2e3,1.65
optomechanics_resonator,21,Park et al.,2.8e-11,,Toroidal Microresonator,2009,,,118.6,3.4e3,1.4
optomechanics_resonator,22,Lin et al.,1.5e-13,,Toroidal Microresonator,2009,,,8.53,4.07e3,300
optomechanics_resonator,23,Lee et al.,3e-8,,Toroidal Microresonator,2010,,,6.272,5.45e2,300
optomechanics_resonator,24,Rocheleau et al.,2.1e-15,,Superconducting Circuit,2010,,,6.30,1e6,0.020
optomechanics_resonator,25,Anetsberger et al.,3.7e-15,,Toroidal Microresonator,2010,,,8.30,3e4,300
optomechanics_resonator,26,Teufel et al.,4.8e-14,,Superconducting Circuit,2011,,,10.69,3.6e5,0.020
optomechanics_resonator,27,Kuhn et al.,2.5e-8,,Beam or membrane,2011,,,3.2,5e6,300
optomechanics_resonator,28,Zheng et al.,6.11e-15,,Photonic Crystal,2012,,,65,3.76e2,300
optomechanics_resonator,29,Serra et al.,3e-7,,Mirror,2012,,,0.085,2.6e6,4.5
optomechanics_resonator,30,Karuza et al.,4.5e-11,,Mirror,2013,,,0.36,1.22e5,300
optomechanics_resonator,31,Torres et al.,2.1e-7,,Beam or membrane,2013,,,0.40,7.5e5,300
optomechanics_resonator,32,Doolin et al.,1.4e-16,,Mirror,2014,,,20.1,3.6e3,0.01
optomechanics_resonator,33,Safavi-Naeini et al.,4e-18,,Photonic Crystal,2014,,,9.35e3,3.74e7,20
optomechanics_resonator,34,Song et al.,5.9e-18,,Beam or membrane,2014,,,24,1.5e4,0.06
optomechanics_resonator,35,Paraïso et al.,3.6e-15,,Photonic Crystal,2015,,,11,1e7,4
optomechanics_resonator,36,Pirkkalainen et al.,1.02e-13,,Superconducting Circuit,2015,,,13.032,3.9e4,0.025
optomechanics_resonator,37,Yuan et al.,2e-10,,Beam or membrane,2015,,,0.123,3.5e7,0.000035
optomechanics_resonator,38,Pontin et al.,2.5e-7,,Mirror,2016,,,0.172,5e4,300
optomechanics_resonator,39,Santos et al.,1.0e-7,,Beam or membrane,2017,,,7,1e7,0.03
optomechanics_resonator,40,Cripe et al.,5e-10,,Mirror,2018,,,2.88e-4,8e3,
optomechanics_resonator,41,Ockeloen-Korppi et al.,4.2e-14,,Superconducting Circuit,2018,,,10,1e5,0.014
optomechanics_resonator,42,Tavernarakis et al.,7.9e-19,,Beam or membrane,2018,,,0.038,2245,300
optomechanics_resonator,43,Hauer et al.,1.83e-16,,Beam or membrane,2019,,,11.2,2.99e4,4.2
optomechanics_resonator,44,Rodrigues et al.,1.0e-15,,Beam or membrane,2019,,,7.129,9e5,0.015
optomechanics_resonator,45,Delić et al.,3.57e-18,,Levitated Mircosphere,2020,,,0.305,1.45e2,0.000012
optomechanics_resonator,46,Lépinay et al.,4.2e-14,,Beam or membrane,2020,,,6.69,1.2e5,0.01
optomechanics_resonator,47,Bothner et al.,6.8e-15,,Beam or membrane,2020,,,1.4315,1.95e5,0.015
optomechanics_resonator,48,Liu et al.,1.26e-6,,Beam or membrane,2021,,,1.7e-3,1e7,0.02
optomechanics_resonator,49,Cattiaux et al.,4.2e-14,,Beam or membrane,2021,,,15.1,1.5e5,0.0005
optomechanics_resonator,50,Militaru et al.,1.22e-18,,Levitated Mircosphere,2022,,,0.073,1.83e3,
optomechanics_resonator,51,Youssefi et al.,4.2e-12,,Superconducting Circuit,2022,,,2.142,4.98e5,0.015
optomechanics_resonator,52,Bothner et al.,1.9e-15,,Superconducting Circuit,2022,,,5.32,4e5,0.015
optomechanics_resonator,53,Reigue et al.,1.23e-14,,Beam or membrane,2023,,,1.25e-3,1e5,0.02
optomechanics_resonator,54,Piotrowski et al.,3.4e-18,,Levitated Mircosphere,2023,,,0.23,2.3e3,300
optomechanics_resonator,55,Tenbrake et al.,2.4e-12,,Beam or membrane,2024,,,2.1,20,4
)history";
    return text;
}

inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace detail {

// One CSV line; fields may be double-quoted, with "" as an escaped quote.
inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char ch = line[k];
        if (quoted) {
            if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                out.back() += '"';
                ++k;
            } else if (ch == '"') {
                quoted = false;
            } else {
                out.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.emplace_back();
        } else {
            out.back() += ch;
        }
    }
    return out;
}

inline double parse_number(const std::string& field, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used == field.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError::at(where, "not a number: '" + field + "'");
}

inline std::optional<double> parse_optional(const std::string& field, const std::string& where) {
    if (field.empty()) {
        return std::nullopt;
    }
    return parse_number(field, where);
}

} // namespace detail

inline std::vector<HistoricalRecord> parse_history_csv(std::string_view text) {
    std::vector<HistoricalRecord> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line_no == 1 || line.empty()) {
            continue;
        }
        const std::string where = "history line " + std::to_string(line_no);
        const auto f = detail::split_csv_line(line);
        if (f.size() != 12) {
            throw ConfigError::at(where, "expected 12 fields, got " + std::to_string(f.size()));
        }
        HistoricalRecord r;
        if (f[0] == "gravity_experiment") {
            r.category = HistoryCategory::gravity_experiment;
        } else if (f[0] == "optomechanics_resonator") {
            r.category = HistoryCategory::optomechanics_resonator;
        } else {
            throw ConfigError::at(where, "unknown category '" + f[0] + "'");
        }
        r.index = static_cast<int>(detail::parse_number(f[1], where));
        r.author = f[2];
        r.mass_kg = detail::parse_number(f[3], where);
        r.material = f[4];
        r.geometry = f[5];
        r.year = static_cast<int>(detail::parse_number(f[6], where));
        r.G_value = detail::parse_optional(f[7], where);
        r.dG_ppm = detail::parse_optional(f[8], where);
        r.omega_m_over_2pi_mhz = detail::parse_optional(f[9], where);
        r.Q_m = detail::parse_optional(f[10], where);
        r.T_kelvin = detail::parse_optional(f[11], where);
        if (!(r.mass_kg > 0.0)) {
            throw ConfigError::at(where, "mass must be positive");
        }
        if (r.year < 1790 || r.year > 2025) {
            throw ConfigError::at(where, "year outside 1790..2025");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

inline const std::vector<HistoricalRecord>& history_records() {
    static const std::vector<HistoricalRecord> rows = parse_history_csv(history_csv());
    return rows;
}

struct HistoryFilter {
    std::optional<HistoryCategory> category;
    std::optional<int> year_min;
    std::optional<int> year_max;
};

inline std::vector<HistoricalRecord> filter_history(const HistoryFilter& f,
                                                    const std::vector<HistoricalRecord>& rows = history_records()) {
    std::vector<HistoricalRecord> out;
    for (const auto& r : rows) {
        if (f.category && r.category != *f.category) continue;
        if (f.year_min && r.year < *f.year_min) continue;
        if (f.year_max && r.year > *f.year_max) continue;
        out.push_back(r);
    }
    return out;
}

// Running envelopes: the lightest gravity source mass and the heaviest
// resonator mass reported up to and including `year`.
struct OverlapPoint {
    int year = 0;
    std::optional<double> min_source_mass;
    std::optional<double> max_resonator_mass;
    bool overlap = false;  // min_source_mass <= max_resonator_mass
};

inline std::vector<OverlapPoint> overlap_series(const std::vector<HistoricalRecord>& rows = history_records()) {
    std::map<int, std::vector<const HistoricalRecord*>> by_year;
    for (const auto& r : rows) {
        by_year[r.year].push_back(&r);
    }
    std::vector<OverlapPoint> out;
    OverlapPoint run;
    for (const auto& [year, group] : by_year) {
        run.year = year;
        for (const auto* r : group) {
            if (r->category == HistoryCategory::gravity_experiment) {
                run.min_source_mass = std::min(run.min_source_mass.value_or(r->mass_kg), r->mass_kg);
            } else {
                run.max_resonator_mass = std::max(run.max_resonator_mass.value_or(r->mass_kg), r->mass_kg);
            }
        }
        run.overlap = run.min_source_mass && run.max_resonator_mass && *run.min_source_mass <= *run.max_resonator_mass;
        out.push_back(run);
    }
    return out;
}

inline std::optional<int> first_overlap_year(const std::vector<HistoricalRecord>& rows = history_records()) {
    for (const auto& pt : overlap_series(rows)) {
        if (pt.overlap) {
            return pt.year;
        }
    }
    return std::nullopt;
}

} // namespace gravomit

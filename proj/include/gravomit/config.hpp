#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gravomit/error.hpp"
#include "gravomit/params.hpp"
#include "gravomit/units.hpp"

namespace gravomit {

using json = nlohmann::json;

// Section and field names accepted in a config document.  Numeric fields
// are {"value": v, "unit": "tag"}; dimensionless ones may be bare numbers.
//
//   {"mechanics": {"M1": {"value": 1.26, "unit": "mg"}, ...},
//    "cavity": {"delta_bar": {"sideband": "red"}, ...},
//    "options": {"g_om_hz_as_angular": true, "unsafe_drive_amplitude": false}}

struct ConfigOptions {
    bool g_om_hz_as_angular = true;
    bool unsafe_drive_amplitude = false;
};

namespace detail {

class SectionReader {
public:
    SectionReader(const json& doc, std::string name, bool required, const UnitOptions& units)
        : name_(std::move(name)), units_(units) {
        if (!doc.contains(name_)) {
            if (required) {
                throw ConfigError::at(name_, "missing required section");
            }
            return;
        }
        section_ = &doc.at(name_);
        if (!section_->is_object()) {
            throw ConfigError::at(name_, "section must be an object");
        }
    }

    bool present() const { return section_ != nullptr; }
    bool has(const std::string& key) const { return section_ && section_->contains(key); }
    std::string path(const std::string& key) const { return name_ + "." + key; }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return section_->at(key);
    }

    std::optional<double> optional_quantity(const std::string& key, Dimension dim) {
        if (!has(key)) {
            return std::nullopt;
        }
        return parse_quantity(raw(key), path(key), dim, units_);
    }

    double quantity(const std::string& key, Dimension dim) {
        auto v = optional_quantity(key, dim);
        if (!v) {
            throw ConfigError::at(path(key), "missing required field");
        }
        return *v;
    }

    double quantity_or(const std::string& key, Dimension dim, double fallback) {
        return optional_quantity(key, dim).value_or(fallback);
    }

    void reject_unknown() const {
        if (!section_) {
            return;
        }
        for (const auto& item : section_->items()) {
            if (!seen_.count(item.key())) {
                throw ConfigError::at(path(item.key()), "unknown key");
            }
        }
    }

    static double parse_quantity(const json& node, const std::string& path, Dimension dim, const UnitOptions& units) {
        if (node.is_number()) {
            if (dim != Dimension::dimensionless && dim != Dimension::field_amplitude) {
                throw ConfigError::at(path, std::string("a ") + std::string(dimension_name(dim)) +
                                                " needs {\"value\", \"unit\"}");
            }
            return node.get<double>();
        }
        if (!node.is_object()) {
            throw ConfigError::at(path, "expected a number or {\"value\", \"unit\"}");
        }
        for (const auto& item : node.items()) {
            if (item.key() != "value" && item.key() != "unit") {
                throw ConfigError::at(path + "." + item.key(), "unknown key");
            }
        }
        if (!node.contains("value") || !node.at("value").is_number()) {
            throw ConfigError::at(path + ".value", "missing or non-numeric value");
        }
        const std::string unit = node.value("unit", std::string());
        const auto factor = unit_factor(unit, dim, units);
        if (!factor) {
            throw ConfigError::at(path + ".unit", "unit '" + unit + "' is not a " +
                                                      std::string(dimension_name(dim)) + " unit");
        }
        return node.at("value").get<double>() * *factor;
    }

private:
    std::string name_;
    const json* section_ = nullptr;
    UnitOptions units_;
    std::set<std::string> seen_;
};

inline ExternalNoise parse_external_noise(const json& node, const std::string& path, const UnitOptions& units) {
    if (node.is_object() && node.contains("table")) {
        for (const auto& item : node.items()) {
            if (item.key() != "table" && item.key() != "unit" && item.key() != "omega_unit") {
                throw ConfigError::at(path + "." + item.key(), "unknown key");
            }
        }
        const std::string unit = node.value("unit", std::string("m^2/Hz"));
        const std::string omega_unit = node.value("omega_unit", std::string("rad/s"));
        const auto s_factor = unit_factor(unit, Dimension::displacement_psd, units);
        const auto w_factor = unit_factor(omega_unit, Dimension::angular_frequency, units);
        if (!s_factor) {
            throw ConfigError::at(path + ".unit", "unit '" + unit + "' is not a displacement spectral density unit");
        }
        if (!w_factor) {
            throw ConfigError::at(path + ".omega_unit", "unit '" + omega_unit + "' is not a frequency unit");
        }
        const json& rows = node.at("table");
        if (!rows.is_array() || rows.empty()) {
            throw ConfigError::at(path + ".table", "expected a non-empty array of [omega, S] pairs");
        }
        std::vector<std::pair<double, double>> table;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const json& row = rows[k];
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
                throw ConfigError::at(path + ".table[" + std::to_string(k) + "]", "expected [omega, S]");
            }
            table.emplace_back(row[0].get<double>() * *w_factor, row[1].get<double>() * *s_factor);
        }
        return ExternalNoise(std::move(table));
    }
    return ExternalNoise(SectionReader::parse_quantity(node, path, Dimension::displacement_psd, units));
}

} // namespace detail

inline SystemParams load_config(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config root must be an object");
    }
    static const std::set<std::string> sections = {"mechanics", "cavity",   "gravity", "probe",
                                                   "environment", "membrane", "options"};
    for (const auto& item : doc.items()) {
        if (!sections.count(item.key())) {
            throw ConfigError::at(item.key(), "unknown section");
        }
    }

    ConfigOptions options;
    if (doc.contains("options")) {
        const json& o = doc.at("options");
        if (!o.is_object()) {
            throw ConfigError::at("options", "section must be an object");
        }
        for (const auto& item : o.items()) {
            if (!item.value().is_boolean()) {
                throw ConfigError::at("options." + item.key(), "expected true or false");
            }
            if (item.key() == "g_om_hz_as_angular") {
                options.g_om_hz_as_angular = item.value().get<bool>();
            } else if (item.key() == "unsafe_drive_amplitude") {
                options.unsafe_drive_amplitude = item.value().get<bool>();
            } else {
                throw ConfigError::at("options." + item.key(), "unknown key");
            }
        }
    }
    UnitOptions units;
    units.hz_per_meter_is_angular = options.g_om_hz_as_angular;

    SystemParams p;

    detail::SectionReader mech(doc, "mechanics", true, units);
    p.mechanics.M1 = mech.quantity("M1", Dimension::mass);
    p.mechanics.omega1 = mech.quantity("omega1", Dimension::angular_frequency);
    const auto gamma1 = mech.optional_quantity("gamma1", Dimension::angular_frequency);
    const auto q1 = mech.optional_quantity("Q1", Dimension::dimensionless);
    if (!gamma1 && !q1) {
        throw ConfigError::at("mechanics.gamma1", "missing required field (give gamma1 or Q1)");
    }
    if (gamma1 && q1) {
        const double implied = p.mechanics.omega1 / *gamma1;
        if (!(std::abs(*q1 - implied) <= 1e-9 * std::abs(*q1))) {
            throw ConfigError::at("mechanics.Q1", "inconsistent with omega1 / gamma1");
        }
    }
    p.mechanics.gamma1 = gamma1 ? *gamma1 : p.mechanics.omega1 / *q1;
    p.mechanics.Q1 = q1 ? *q1 : p.mechanics.omega1 / *gamma1;
    mech.reject_unknown();

    detail::SectionReader cav(doc, "cavity", true, units);
    p.cavity.kappa = cav.quantity("kappa", Dimension::angular_frequency);
    p.cavity.eta_c = cav.quantity("eta_c", Dimension::dimensionless);
    p.cavity.G_om = cav.quantity("G_om", Dimension::coupling);
    p.cavity.abar_mag = cav.quantity("abar_mag", Dimension::field_amplitude);
    p.cavity.abar_arg = cav.quantity_or("abar_arg", Dimension::phase, 0.0);
    p.cavity.omega_c = cav.quantity("omega_c", Dimension::angular_frequency);
    if (!cav.has("delta_bar")) {
        throw ConfigError::at("cavity.delta_bar", "missing required field");
    }
    const json& db = cav.raw("delta_bar");
    if (db.is_object() && db.contains("sideband")) {
        if (db.size() != 1 || db.at("sideband") != "red") {
            throw ConfigError::at("cavity.delta_bar.sideband", "only \"red\" is supported");
        }
        p.cavity.red_sideband = true;
    } else {
        p.cavity.red_sideband = false;
        p.cavity.delta_bar = detail::SectionReader::parse_quantity(db, "cavity.delta_bar",
                                                                   Dimension::angular_frequency, units);
    }
    cav.reject_unknown();

    detail::SectionReader grav(doc, "gravity", true, units);
    p.gravity.M2 = grav.quantity("M2", Dimension::mass);
    p.gravity.d = grav.quantity("d", Dimension::length);
    p.gravity.x_s = grav.quantity("x_s", Dimension::length);
    p.gravity.phi_s = grav.quantity_or("phi_s", Dimension::phase, 0.0);
    p.gravity.G_newton = grav.quantity_or("G_newton", Dimension::gravitational_constant, constants::G_newton);
    p.gravity.allow_large_amplitude = options.unsafe_drive_amplitude;
    grav.reject_unknown();

    detail::SectionReader probe(doc, "probe", true, units);
    p.probe.omega_p = probe.quantity("omega_p", Dimension::angular_frequency);
    p.probe.phi_p = probe.quantity_or("phi_p", Dimension::phase, 0.0);
    p.probe.S_add = probe.quantity_or("S_add", Dimension::dimensionless, 0.0);
    const auto power = probe.optional_quantity("P_p", Dimension::power);
    const auto alpha = probe.optional_quantity("alpha_p", Dimension::photon_flux_amplitude);
    if (!power && !alpha) {
        throw ConfigError::at("probe.P_p", "missing required field (give P_p or alpha_p)");
    }
    if (power && alpha) {
        const double implied = *alpha * *alpha * constants::hbar * p.probe.omega_p;
        if (!(std::abs(implied - *power) <= 1e-9 * std::abs(*power))) {
            throw ConfigError::at("probe.alpha_p", "inconsistent with P_p");
        }
    }
    p.probe.P_p = power ? *power : *alpha * *alpha * constants::hbar * p.probe.omega_p;
    p.probe.alpha_p = ProbeParams::amplitude_from_power(p.probe.P_p, p.probe.omega_p);
    probe.reject_unknown();

    detail::SectionReader env(doc, "environment", false, units);
    p.environment.T = env.quantity_or("T", Dimension::temperature, 0.0);
    if (env.has("S_x_ext")) {
        p.environment.S_x_ext = detail::parse_external_noise(env.raw("S_x_ext"), "environment.S_x_ext", units);
    }
    env.reject_unknown();

    detail::SectionReader mem(doc, "membrane", false, units);
    if (mem.present()) {
        MembraneParams m;
        m.sigma = mem.quantity("sigma", Dimension::pressure);
        m.rho = mem.quantity("rho", Dimension::density);
        m.side_l = mem.quantity("side_l", Dimension::length);
        m.thickness_b = mem.quantity("thickness_b", Dimension::length);
        mem.reject_unknown();
        p.membrane = m;
    }

    validate(p);
    return p;
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

inline SystemParams load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path + ": cannot open config file");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return load_config(parse_json_text(text.str(), path));
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"table1"};
    return names;
}

inline json preset_document(const std::string& name) {
    if (name != "table1") {
        throw ConfigError::at("preset", "unknown preset '" + name + "'");
    }
    return json::parse(R"preset({
  "mechanics": {
    "M1": {"value": 1.26, "unit": "mg"},
    "omega1": {"value": 8.0, "unit": "kHz"},
    "gamma1": {"value": 0.8, "unit": "mHz"},
    "Q1": 1e7
  },
  "cavity": {
    "kappa": {"value": 8.0, "unit": "kHz"},
    "eta_c": 0.5,
    "delta_bar": {"sideband": "red"},
    "G_om": {"value": 5e15, "unit": "Hz/m"},
    "abar_mag": {"value": 100, "unit": "sqrt(photons)"},
    "abar_arg": {"value": 0, "unit": "rad"},
    "omega_c": {"value": 5.0, "unit": "GHz"}
  },
  "gravity": {
    "M2": {"value": 1.26, "unit": "mg"},
    "d": {"value": 0.55, "unit": "mm"},
    "x_s": {"value": 5, "unit": "um"},
    "phi_s": {"value": -1, "unit": "pi_rad"}
  },
  "probe": {
    "P_p": {"value": 1, "unit": "aW"},
    "omega_p": {"value": 5.0, "unit": "GHz"},
    "phi_p": {"value": 0, "unit": "rad"},
    "S_add": 0
  },
  "environment": {
    "T": {"value": 10, "unit": "mK"},
    "S_x_ext": {"value": 0, "unit": "m^2/Hz"}
  },
  "membrane": {
    "sigma": {"value": 10, "unit": "GPa"},
    "rho": {"value": 3.21, "unit": "g/cm^3"},
    "side_l": {"value": 5, "unit": "mm"},
    "thickness_b": {"value": 100, "unit": "nm"}
  }
})preset");
}

inline SystemParams load_preset(const std::string& name) { return load_config(preset_document(name)); }

} // namespace gravomit

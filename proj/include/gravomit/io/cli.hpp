#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gravomit/analysis.hpp"
#include "gravomit/config.hpp"
#include "gravomit/error.hpp"
#include "gravomit/history.hpp"
#include "gravomit/noise.hpp"
#include "gravomit/oracle.hpp"
#include "gravomit/params.hpp"
#include "gravomit/perturbation.hpp"
#include "gravomit/response.hpp"

namespace gravomit::cli {

inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_config = 2, exit_numerical = 3 };

using json = nlohmann::json;

// Shared by every subcommand.
struct CommonOptions {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::optional<double> r;
    std::optional<double> phi;
    std::string precision = "extended";
    std::string fwhm_mode = "absolute";
    int digits = 17;
    bool svg = false;
};

struct SpectrumOptions {
    bool driven = false;
    bool undriven = false;
    bool unloaded = false;
    bool lorentzian = false;
    double zoom = 5e-7;
    int points = 4001;
};

struct SweepOptions {
    std::string axis = "r";
    std::vector<double> values;
    std::optional<double> from;
    std::optional<double> to;
    int count = 11;
};

struct CompareOptions {
    std::string mode = "dynamic";
};

struct NoiseOptions {
    std::optional<double> omega;
    int points = 201;
    double span = 10.0;  // in gamma_eff
    std::optional<double> target_tau;
};

struct VerifyOptions {
    double reduced_q = 1e3;
    int frequencies = 10;
};

struct HistoryOptions {
    std::string category;
    std::optional<int> year_min;
    std::optional<int> year_max;
};

// ---- formatting -----------------------------------------------------------

inline std::string fmt(double v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// JSON numbers cannot hold inf/nan.
inline json num(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
}

// ---- plots ----------------------------------------------------------------

struct Curve {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color;
    bool markers = false;
};

// Minimal static SVG: frame, min/max tick labels, one polyline or marker set per curve.
inline std::string render_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<Curve>& curves) {
    constexpr double width = 720, height = 480, left = 90, right = 20, top = 40, bottom = 60;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& c : curves) {
        for (std::size_t k = 0; k < c.x.size(); ++k) {
            if (!std::isfinite(c.x[k]) || !std::isfinite(c.y[k])) continue;
            xmin = std::min(xmin, c.x[k]);
            xmax = std::max(xmax, c.x[k]);
            ymin = std::min(ymin, c.y[k]);
            ymax = std::max(ymax, c.y[k]);
        }
    }
    if (!(xmax > xmin)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymax > ymin)) { ymin -= 0.5; ymax += 0.5; }
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
    auto py = [&](double y) { return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
      << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    s << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << xlabel << "</text>\n";
    s << "<text x=\"16\" y=\"" << height / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 " << height / 2
      << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
    s << "<text x=\"" << left << "\" y=\"" << height - bottom + 16 << "\" font-size=\"10\">" << fmt(xmin, 8)
      << "</text>\n";
    s << "<text x=\"" << width - right << "\" y=\"" << height - bottom + 16
      << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(xmax, 8) << "</text>\n";
    s << "<text x=\"" << left - 4 << "\" y=\"" << height - bottom << "\" font-size=\"10\" text-anchor=\"end\">"
      << fmt(ymin, 6) << "</text>\n";
    s << "<text x=\"" << left - 4 << "\" y=\"" << top + 10 << "\" font-size=\"10\" text-anchor=\"end\">"
      << fmt(ymax, 6) << "</text>\n";
    double legend_y = top + 16;
    for (const auto& c : curves) {
        if (c.markers) {
            for (std::size_t k = 0; k < c.x.size(); ++k) {
                if (!std::isfinite(c.x[k]) || !std::isfinite(c.y[k])) continue;
                s << "<circle cx=\"" << px(c.x[k]) << "\" cy=\"" << py(c.y[k]) << "\" r=\"3\" fill=\"" << c.color
                  << "\"/>\n";
            }
        } else {
            s << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.2\" points=\"";
            for (std::size_t k = 0; k < c.x.size(); ++k) {
                if (!std::isfinite(c.x[k]) || !std::isfinite(c.y[k])) continue;
                s << px(c.x[k]) << ',' << py(c.y[k]) << ' ';
            }
            s << "\"/>\n";
        }
        s << "<text x=\"" << width - right - 8 << "\" y=\"" << legend_y << "\" font-size=\"11\" text-anchor=\"end\" "
          << "fill=\"" << c.color << "\">" << c.label << "</text>\n";
        legend_y += 14;
    }
    s << "</svg>\n";
    return s.str();
}

// ---- run context ----------------------------------------------------------

// Collects output files and writes the manifest at the end of a run.
class RunContext {
public:
    RunContext(std::string command, CommonOptions common) : command_(std::move(command)), common_(std::move(common)) {
        if (!common_.out_dir.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(common_.out_dir, ec);
            if (ec) {
                throw ConfigError::at("--out", "cannot create directory '" + common_.out_dir + "': " + ec.message());
            }
        }
    }

    bool writes_files() const { return !common_.out_dir.empty(); }
    const CommonOptions& common() const { return common_; }
    int digits() const { return common_.digits; }
    std::string num(double v) const { return fmt(v, common_.digits); }

    void write(const std::string& name, const std::string& content) {
        if (!writes_files()) return;
        const auto path = std::filesystem::path(common_.out_dir) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw ConfigError::at("--out", "cannot write '" + path.string() + "'");
        }
        f << content;
        files_.push_back(name);
    }

    void plot(const std::string& name, const std::string& title, const std::string& xlabel, const std::string& ylabel,
              const std::vector<Curve>& curves) {
        if (common_.svg) write(name, render_svg(title, xlabel, ylabel, curves));
    }

    void set_params_hash(std::uint64_t h) { params_hash_ = h; }

    // Manifest last so it lists every other file.
    void finish(const std::string& argv_line) {
        if (!writes_files()) return;
        json m;
        m["command"] = command_;
        m["argv"] = argv_line;
        m["params_hash"] = params_hash_ ? json(hex64(*params_hash_)) : json(nullptr);
        m["tool"] = "gravomit";
        m["version"] = tool_version;
        m["timestamp"] = utc_timestamp();
        m["outputs"] = files_;
        const auto path = std::filesystem::path(common_.out_dir) / "manifest.json";
        std::ofstream f(path, std::ios::binary);
        f << m.dump(2) << '\n';
    }

private:
    std::string command_;
    CommonOptions common_;
    std::vector<std::string> files_;
    std::optional<std::uint64_t> params_hash_;
};

struct Loaded {
    SystemParams params;
    DerivedQuantities derived;
};

inline Loaded load_system(const CommonOptions& c) {
    if (!c.config_path.empty() && !c.preset.empty()) {
        throw CLI::ValidationError("--config and --preset are mutually exclusive");
    }
    Loaded out;
    if (!c.config_path.empty()) {
        out.params = load_config_file(c.config_path);
    } else if (!c.preset.empty()) {
        out.params = load_preset(c.preset);
    } else {
        throw CLI::RequiredError("one of --config or --preset");
    }
    out.derived = derive(out.params);
    if (c.r) {
        if (!(*c.r >= 0.0)) throw ConfigError::at("--r", "must be >= 0");
        out.derived.r = *c.r;
    }
    if (c.phi) {
        out.derived.phi = wrap_phase(*c.phi);
    }
    return out;
}

inline PeakOptions peak_options(const CommonOptions& c) {
    PeakOptions opt;
    if (c.precision == "extended") {
        opt.precision = Precision::extended;
    } else if (c.precision == "standard") {
        opt.precision = Precision::standard;
    } else {
        throw CLI::ValidationError("--precision", "expected standard or extended");
    }
    if (c.fwhm_mode == "absolute") {
        opt.fwhm_mode = FwhmMode::absolute;
    } else if (c.fwhm_mode == "baseline") {
        opt.fwhm_mode = FwhmMode::baseline;
    } else {
        throw CLI::ValidationError("--fwhm-mode", "expected absolute or baseline");
    }
    return opt;
}

inline json metrics_json(const PeakMetrics& m) {
    return {{"height", num(m.height)},
            {"omega_max_rad_s", num(m.omega_max)},
            {"offset_rad_s", num(m.offset)},
            {"fwhm_rad_s", num(m.fwhm)},
            {"baseline", num(m.baseline)}};
}

inline json difference_json(const Difference& d) {
    return {{"value", num(d.value)}, {"bound", num(d.bound)}, {"below_resolution", d.below_resolution}};
}

inline std::string spectrum_csv(const ComplexSpectrum& s, const RunContext& ctx) {
    std::string out = "omega_rad_s,omega_over_2pi_hz,re_tp,im_tp,abs_tp_sq,kind\n";
    const std::string kind(kind_name(s.kind));
    for (std::size_t k = 0; k < s.omega_grid.size(); ++k) {
        const double w = s.omega_grid[k];
        const auto t = s.values[k];
        out += ctx.num(w) + ',' + ctx.num(w / constants::two_pi) + ',' + ctx.num(t.real()) + ',' + ctx.num(t.imag()) +
               ',' + ctx.num(std::norm(t)) + ',' + kind + '\n';
    }
    return out;
}

// ---- subcommands ----------------------------------------------------------

inline json cmd_spectrum(RunContext& ctx, const SpectrumOptions& o) {
    const auto [p, d] = load_system(ctx.common());
    ctx.set_params_hash(fingerprint(p));
    const PeakOptions opt = peak_options(ctx.common());
    const WindowParams w = window_params(p, d);

    bool driven = o.driven, undriven = o.undriven;
    if (!o.driven && !o.undriven && !o.unloaded && !o.lorentzian) {
        driven = undriven = true;
    } else if (o.lorentzian && !o.driven && !o.undriven) {
        driven = undriven = true;
    }
    std::vector<SpectrumKind> kinds;
    if (driven) kinds.push_back(SpectrumKind::driven);
    if (undriven) kinds.push_back(SpectrumKind::undriven);
    if (o.unloaded) kinds.push_back(SpectrumKind::unloaded);
    if (o.lorentzian) {
        require_lorentzian_conditions(w);
        if (driven) kinds.push_back(SpectrumKind::lorentzian_driven);
        if (undriven) kinds.push_back(SpectrumKind::lorentzian_undriven);
    }
    if (o.points < 2) throw CLI::ValidationError("--points", "needs at least 2");
    if (!(o.zoom > 0.0)) throw CLI::ValidationError("--zoom", "must be positive");

    const auto grid = default_grid(p, d, static_cast<std::size_t>(o.points));
    const auto zoom = zoom_grid(p, d, o.zoom, static_cast<std::size_t>(o.points));

    json summary;
    summary["command"] = "spectrum";
    summary["params_hash"] = hex64(fingerprint(p));
    summary["precision"] = precision_name(opt.precision);
    summary["r"] = num(w.r);
    summary["phi"] = num(w.phi);
    summary["omega1_prime_rad_s"] = num(d.omega1_prime);
    std::vector<Curve> full_curves, zoom_curves;
    const char* palette[] = {"#c0392b", "#2471a3", "#7d3c98", "#d68910", "#229954"};
    std::size_t colour = 0;
    for (auto kind : kinds) {
        const auto s = evaluate_spectrum(kind, grid, p, d);
        const auto z = evaluate_spectrum(kind, zoom, p, d);
        const std::string name(kind_name(kind));
        ctx.write("spectrum_" + name + ".csv", spectrum_csv(s, ctx));
        ctx.write("spectrum_" + name + "_zoom.csv", spectrum_csv(z, ctx));
        summary["peaks"][name] = metrics_json(peak_metrics(w, kind, opt));
        Curve c{name, {}, {}, palette[colour++ % 5]};
        Curve cz = c;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            c.x.push_back(grid[k] / constants::two_pi);
            c.y.push_back(std::norm(s.values[k]));
            cz.x.push_back((zoom[k] - d.omega1_prime) / constants::two_pi);
            cz.y.push_back(std::norm(z.values[k]));
        }
        full_curves.push_back(std::move(c));
        zoom_curves.push_back(std::move(cz));
    }
    if (driven && undriven) {
        const auto delta = delta_transmission(w, opt);
        summary["delta_tp_sq_max"] = num(delta.max_value);
        summary["delta_tp_sq_argmax_rad_s"] = num(delta.argmax);
        summary["delta_tp_sq_argmax_offset_rad_s"] = num(delta.offset);
    }
    if (o.lorentzian) {
        // Largest relative |t_p|^2 error of the approximation over omega1' +- 5 gamma_eff.
        json errors;
        const auto window = linear_grid(d.omega1_prime - 5.0 * d.gamma_eff, d.omega1_prime + 5.0 * d.gamma_eff, 4001);
        for (auto [full, approx] : {std::pair{SpectrumKind::driven, SpectrumKind::lorentzian_driven},
                                    std::pair{SpectrumKind::undriven, SpectrumKind::lorentzian_undriven}}) {
            if ((full == SpectrumKind::driven && !driven) || (full == SpectrumKind::undriven && !undriven)) continue;
            const auto a = evaluate_spectrum(full, window, p, d);
            const auto b = evaluate_spectrum(approx, window, p, d);
            double worst = 0.0;
            for (std::size_t k = 0; k < window.size(); ++k) {
                const double exact = std::norm(a.values[k]);
                worst = std::max(worst, std::abs(std::norm(b.values[k]) - exact) / exact);
            }
            errors[std::string(kind_name(full))] = num(worst);
        }
        summary["lorentzian_max_rel_error"] = errors;
        summary["lorentzian_fwhm_rad_s"] = num(lorentzian_fwhm(w));
    }
    ctx.plot("spectrum.svg", "|t_p|^2", "omega / 2pi (Hz)", "|t_p|^2", full_curves);
    ctx.plot("spectrum_zoom.svg", "|t_p|^2 near omega1'", "(omega - omega1') / 2pi (Hz)", "|t_p|^2", zoom_curves);
    ctx.write("summary.json", summary.dump(2) + '\n');
    return summary;
}

inline std::vector<double> sweep_values(const SweepOptions& o) {
    if (!o.values.empty()) {
        if (o.from || o.to) throw CLI::ValidationError("--values excludes --from/--to");
        return o.values;
    }
    if (!o.from || !o.to) throw CLI::RequiredError("--values or both --from and --to");
    if (o.count < 2) throw CLI::ValidationError("--count", "needs at least 2");
    return linear_grid(*o.from, *o.to, static_cast<std::size_t>(o.count));
}

inline json cmd_sweep(RunContext& ctx, const SweepOptions& o) {
    const auto [p, d] = load_system(ctx.common());
    ctx.set_params_hash(fingerprint(p));
    const PeakOptions opt = peak_options(ctx.common());
    SweepAxis axis;
    try {
        axis = parse_axis(o.axis);
    } catch (const DomainError& e) {
        throw CLI::ValidationError("--axis", e.what());
    }
    const auto values = sweep_values(o);
    const auto result = sweep(p, d, axis, values, opt);

    std::string csv = "value,driven_height,driven_offset_rad_s,driven_fwhm_rad_s,undriven_height,"
                      "undriven_offset_rad_s,undriven_fwhm_rad_s,delta_tp_sq_max\n";
    Curve hd{"driven", {}, {}, "#c0392b"};
    Curve hu{"undriven", {}, {}, "#2471a3"};
    json rows = json::array();
    for (const auto& pt : result.points) {
        csv += ctx.num(pt.value) + ',' + ctx.num(pt.driven.height) + ',' + ctx.num(pt.driven.offset) + ',' +
               ctx.num(pt.driven.fwhm) + ',' + ctx.num(pt.undriven.height) + ',' + ctx.num(pt.undriven.offset) + ',' +
               ctx.num(pt.undriven.fwhm) + ',' + ctx.num(pt.delta_tp_max) + '\n';
        hd.x.push_back(pt.value);
        hd.y.push_back(pt.driven.height);
        hu.x.push_back(pt.value);
        hu.y.push_back(pt.undriven.height);
        rows.push_back({{"value", num(pt.value)},
                        {"driven", metrics_json(pt.driven)},
                        {"undriven", metrics_json(pt.undriven)},
                        {"delta_tp_sq_max", num(pt.delta_tp_max)}});
    }
    json summary{{"command", "sweep"}, {"axis", axis_name(axis)}, {"params_hash", hex64(fingerprint(p))},
                 {"precision", precision_name(opt.precision)}, {"points", rows}};
    ctx.write("sweep_" + std::string(axis_name(axis)) + ".csv", csv);
    ctx.plot("sweep_" + std::string(axis_name(axis)) + ".svg", "peak height vs " + std::string(axis_name(axis)),
             std::string(axis_name(axis)), "max |t_p|^2", {hd, hu});
    ctx.write("summary.json", summary.dump(2) + '\n');
    return summary;
}

inline json cmd_compare(RunContext& ctx, const CompareOptions& o) {
    const auto [p, d] = load_system(ctx.common());
    ctx.set_params_hash(fingerprint(p));
    const PeakOptions opt = peak_options(ctx.common());
    CompareMode mode;
    if (o.mode == "dynamic") {
        mode = CompareMode::dynamic;
    } else if (o.mode == "static") {
        mode = CompareMode::static_;
    } else {
        throw CLI::ValidationError("--mode", "expected dynamic or static");
    }
    const auto rep = compare(mode, p, d, opt);
    json summary{{"command", "compare"},
                 {"mode", compare_mode_name(rep.mode)},
                 {"precision", precision_name(rep.precision)},
                 {"fwhm_mode", rep.fwhm_mode == FwhmMode::absolute ? "absolute" : "baseline"},
                 {"params_hash", hex64(fingerprint(p))},
                 {"first", metrics_json(rep.first)},
                 {"second", metrics_json(rep.second)},
                 {"delta_tp_sq", difference_json(rep.delta_height)},
                 {"delta_omega_max_rad_s", difference_json(rep.delta_omega_max)},
                 {"delta_fwhm_rad_s", difference_json(rep.delta_fwhm)}};
    json notes = json::array();
    for (auto [name, diff] : {std::pair{"delta_tp_sq", rep.delta_height},
                              std::pair{"delta_omega_max", rep.delta_omega_max},
                              std::pair{"delta_fwhm", rep.delta_fwhm}}) {
        if (diff.below_resolution) {
            notes.push_back(std::string(name) + " is below the achievable resolution at " +
                            std::string(precision_name(rep.precision)) + " precision");
        }
    }
    summary["notes"] = notes;
    ctx.write("compare_" + std::string(compare_mode_name(mode)) + ".json", summary.dump(2) + '\n');
    return summary;
}

inline json budget_json(const NoiseBudget& b) {
    return {{"omega_rad_s", num(b.omega)},         {"S_zp", num(b.s_zp)},
            {"S_T", num(b.s_thermal)},             {"S_E", num(b.s_external)},
            {"S_qba", num(b.s_qba)},               {"S_imp", num(b.s_imprecision)},
            {"S_eff", num(b.s_eff)},               {"tau_seconds", num(b.tau_seconds)},
            {"tau_inverse_hz", num(b.tau_inverse)}};
}

inline json cmd_noise(RunContext& ctx, const NoiseOptions& o) {
    const auto [p, d] = load_system(ctx.common());
    ctx.set_params_hash(fingerprint(p));
    const double omega = o.omega.value_or(d.omega1_prime);
    if (o.points < 2) throw CLI::ValidationError("--points", "needs at least 2");
    const auto grid = linear_grid(omega - o.span * d.gamma_eff, omega + o.span * d.gamma_eff,
                                  static_cast<std::size_t>(o.points));
    const auto table = noise_table(grid, p, d);
    std::string csv = "omega_rad_s,omega_over_2pi_hz,S_zp,S_T,S_E,S_qba,S_imp,S_eff,tau_seconds\n";
    Curve total{"S_eff", {}, {}, "#c0392b"};
    for (const auto& b : table) {
        csv += ctx.num(b.omega) + ',' + ctx.num(b.omega / constants::two_pi) + ',' + ctx.num(b.s_zp) + ',' +
               ctx.num(b.s_thermal) + ',' + ctx.num(b.s_external) + ',' + ctx.num(b.s_qba) + ',' +
               ctx.num(b.s_imprecision) + ',' + ctx.num(b.s_eff) + ',' + ctx.num(b.tau_seconds) + '\n';
        total.x.push_back(b.omega / constants::two_pi);
        total.y.push_back(std::log10(b.s_eff));
    }
    json summary{{"command", "noise"},
                 {"params_hash", hex64(fingerprint(p))},
                 {"units", "force spectral densities in N^2/Hz"},
                 {"at_omega", budget_json(noise_budget(omega, p, d))}};
    if (o.target_tau) {
        summary["target_tau_seconds"] = num(*o.target_tau);
        summary["required_S_x_ext_m2_per_hz"] = num(required_external_noise(*o.target_tau, omega, p, d));
    }
    ctx.write("noise.csv", csv);
    ctx.plot("noise.svg", "total force noise", "omega / 2pi (Hz)", "log10 S_eff (N^2/Hz)", {total});
    ctx.write("summary.json", summary.dump(2) + '\n');
    return summary;
}

inline json cmd_verify(RunContext& ctx, const VerifyOptions& o) {
    const auto [p, d] = load_system(ctx.common());
    ctx.set_params_hash(fingerprint(p));
    if (!(o.reduced_q > 0.0)) throw CLI::ValidationError("--reduced-q", "must be positive");
    if (o.frequencies < 1) throw CLI::ValidationError("--frequencies", "needs at least 1");
    const auto rep = verify_oracle(p, o.reduced_q, o.frequencies);
    std::string csv = "check,omega_rad_s,re_analytic,im_analytic,re_simulated,im_simulated,deviation,tolerance,pass\n";
    for (const auto& e : rep.entries) {
        csv += e.check + ',' + ctx.num(e.omega) + ',' + ctx.num(e.analytic.real()) + ',' + ctx.num(e.analytic.imag()) +
               ',' + ctx.num(e.simulated.real()) + ',' + ctx.num(e.simulated.imag()) + ',' + ctx.num(e.deviation) +
               ',' + ctx.num(e.tolerance) + ',' + (e.pass ? "1" : "0") + '\n';
    }
    json summary{{"command", "verify"},
                 {"params_hash", hex64(fingerprint(p))},
                 {"quality", num(rep.quality)},
                 {"entries", rep.entries.size()},
                 {"max_deviation", num(rep.max_deviation)},
                 {"convergence_ratio", num(rep.convergence_ratio)},
                 {"convergence_order", num(rep.convergence_order)},
                 {"convergence_pass", rep.convergence_pass},
                 {"pass", rep.pass}};
    ctx.write("verify.csv", csv);
    ctx.write("summary.json", summary.dump(2) + '\n');
    return summary;
}

inline json cmd_derive(RunContext& ctx) {
    const auto [p, d] = load_system(ctx.common());
    ctx.set_params_hash(fingerprint(p));
    auto angular = [](double v) { return json{{"rad_s", num(v)}, {"over_2pi_hz", num(v / constants::two_pi)}}; };
    json q;
    q["omega1_prime"] = angular(d.omega1_prime);
    q["omega1_shift"] = angular(d.omega1_shift);
    q["delta_bar"] = angular(d.delta_bar);
    q["g0"] = angular(d.g0);
    q["g"] = angular(d.g);
    q["gamma_eff"] = angular(d.gamma_eff);
    q["gravity_spring_rad2_s2"] = num(d.gravity_spring);
    q["x_zpf_m"] = num(d.x_zpf);
    q["k_G_n_per_m"] = num(d.k_G);
    q["F_G_n"] = num(d.F_G);
    q["F_p_n"] = num(d.F_p);
    q["r"] = d.r ? num(*d.r) : json(nullptr);
    q["phi_rad"] = num(d.phi);
    q["phi_fp_rad"] = num(d.phi_fp);
    q["phi_G_rad"] = num(d.phi_G);
    q["n_bar_1"] = num(d.n_bar_1);
    q["cooperativity"] = num(d.coop);
    q["n_bar_p"] = {{"ordinary_linewidths", num(d.n_bar_p)}, {"angular_linewidths", num(d.n_bar_p_angular)}};
    q["snr_shot"] = {{"ordinary_linewidths", num(d.snr_shot)}, {"angular_linewidths", num(d.snr_shot_angular)}};
    if (p.membrane) {
        q["prestressed_omega0"] = angular(prestressed_frequency(*p.membrane));
    }
    json summary{{"command", "derive"}, {"params_hash", hex64(fingerprint(p))}, {"derived", q}};

    std::string csv = "quantity,value,unit\n";
    auto row = [&](const std::string& name, double v, const std::string& unit) {
        csv += name + ',' + ctx.num(v) + ',' + unit + '\n';
    };
    for (auto [name, v] : {std::pair{"omega1_prime", d.omega1_prime}, std::pair{"omega1_shift", d.omega1_shift},
                           std::pair{"delta_bar", d.delta_bar}, std::pair{"g0", d.g0}, std::pair{"g", d.g},
                           std::pair{"gamma_eff", d.gamma_eff}}) {
        row(name, v, "rad/s");
        row(std::string(name) + "_over_2pi", v / constants::two_pi, "Hz");
    }
    row("x_zpf", d.x_zpf, "m");
    row("k_G", d.k_G, "N/m");
    row("F_G", d.F_G, "N");
    row("F_p", d.F_p, "N");
    if (d.r) row("r", *d.r, "1");
    row("phi", d.phi, "rad");
    row("n_bar_1", d.n_bar_1, "1");
    row("cooperativity", d.coop, "1");
    row("n_bar_p", d.n_bar_p, "1");
    row("snr_shot", d.snr_shot, "1");
    row("n_bar_p_angular", d.n_bar_p_angular, "1");
    row("snr_shot_angular", d.snr_shot_angular, "1");
    ctx.write("derived.csv", csv);
    ctx.write("summary.json", summary.dump(2) + '\n');
    return summary;
}

inline json cmd_history(RunContext& ctx, const HistoryOptions& o) {
    HistoryFilter f;
    if (o.category == "gravity") {
        f.category = HistoryCategory::gravity_experiment;
    } else if (o.category == "optomechanics") {
        f.category = HistoryCategory::optomechanics_resonator;
    } else if (!o.category.empty()) {
        throw CLI::ValidationError("--category", "expected gravity or optomechanics");
    }
    f.year_min = o.year_min;
    f.year_max = o.year_max;
    const auto rows = filter_history(f);

    auto opt = [&](const std::optional<double>& v) { return v ? ctx.num(*v) : std::string(); };
    auto quote = [](const std::string& s) {
        return s.find(',') == std::string::npos ? s : '"' + s + '"';
    };
    std::string csv = "category,index,author,mass_kg,log10_mass_kg,material,geometry,year,G_1e-11_SI,"
                      "dG_over_G_ppm,omega_m_over_2pi_MHz,Q_m,T_K\n";
    Curve grav{"gravity source mass", {}, {}, "#2471a3", true};
    Curve reso{"resonator mass", {}, {}, "#d68910", true};
    for (const auto& r : rows) {
        csv += std::string(category_name(r.category)) + ',' + std::to_string(r.index) + ',' + quote(r.author) + ',' +
               ctx.num(r.mass_kg) + ',' + ctx.num(std::log10(r.mass_kg)) + ',' + quote(r.material) + ',' +
               quote(r.geometry) + ',' + std::to_string(r.year) + ',' + opt(r.G_value) + ',' + opt(r.dG_ppm) + ',' +
               opt(r.omega_m_over_2pi_mhz) + ',' + opt(r.Q_m) + ',' + opt(r.T_kelvin) + '\n';
        auto& c = r.category == HistoryCategory::gravity_experiment ? grav : reso;
        c.x.push_back(r.year);
        c.y.push_back(std::log10(r.mass_kg));
    }
    std::string overlap_csv = "year,min_source_mass_kg,max_resonator_mass_kg,overlap\n";
    for (const auto& pt : overlap_series()) {
        overlap_csv += std::to_string(pt.year) + ',' + opt(pt.min_source_mass) + ',' + opt(pt.max_resonator_mass) +
                       ',' + (pt.overlap ? "1" : "0") + '\n';
    }
    const auto first = first_overlap_year();
    std::size_t n_grav = 0;
    for (const auto& r : history_records()) n_grav += r.category == HistoryCategory::gravity_experiment;
    json summary{{"command", "history"},
                 {"rows_selected", rows.size()},
                 {"gravity_rows", n_grav},
                 {"resonator_rows", history_records().size() - n_grav},
                 {"checksum", hex64(fnv1a(history_csv()))},
                 {"first_overlap_year", first ? json(*first) : json(nullptr)}};
    ctx.write("history.csv", csv);
    ctx.write("overlap.csv", overlap_csv);
    ctx.plot("history.svg", "mass scales by year", "year", "log10 mass (kg)", {grav, reso});
    ctx.write("summary.json", summary.dump(2) + '\n');
    return summary;
}

// ---- entry point ------------------------------------------------------------

// Parses argv, runs one subcommand, prints its JSON summary to `out` and
// returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"gravomit: gravity-driven transparency window toolkit"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    CommonOptions common;
    SpectrumOptions spectrum;
    SweepOptions sweep_opt;
    CompareOptions compare_opt;
    NoiseOptions noise_opt;
    VerifyOptions verify_opt;
    HistoryOptions history_opt;
    double r_value = 0.0, phi_value = 0.0;

    auto add_common = [&](CLI::App* sub, bool physics) {
        sub->add_option("--out", common.out_dir, "output directory (CSV, JSON, manifest)");
        sub->add_option("--digits", common.digits, "significant digits in CSV output")->check(CLI::Range(1, 17));
        sub->add_flag("--svg", common.svg, "also write SVG plots");
        if (!physics) return;
        auto* config = sub->add_option("--config", common.config_path, "JSON configuration file");
        auto* preset = sub->add_option("--preset", common.preset, "built-in parameter set (table1)");
        config->excludes(preset);
        sub->add_option("--r", r_value, "override the force ratio F_G / F_p");
        sub->add_option("--phi", phi_value, "override the drive phase difference (rad)");
        sub->add_option("--precision", common.precision, "standard or extended")
            ->check(CLI::IsMember({"standard", "extended"}));
        sub->add_option("--fwhm-mode", common.fwhm_mode, "absolute or baseline")
            ->check(CLI::IsMember({"absolute", "baseline"}));
    };

    auto* s_spec = app.add_subcommand("spectrum", "transmission spectra on the default and zoomed grids");
    add_common(s_spec, true);
    s_spec->add_flag("--driven", spectrum.driven);
    s_spec->add_flag("--undriven", spectrum.undriven);
    s_spec->add_flag("--unloaded", spectrum.unloaded);
    s_spec->add_flag("--lorentzian", spectrum.lorentzian);
    s_spec->add_option("--zoom", spectrum.zoom, "zoom factor for the magnified grid");
    s_spec->add_option("--points", spectrum.points, "grid points");

    auto* s_sweep = app.add_subcommand("sweep", "peak metrics along one parameter axis");
    add_common(s_sweep, true);
    s_sweep->add_option("--axis", sweep_opt.axis, "kappa, g, Q1, r or phi (SI, angular)")->required();
    s_sweep->add_option("--values", sweep_opt.values, "explicit values")->delimiter(',');
    s_sweep->add_option("--from", sweep_opt.from);
    s_sweep->add_option("--to", sweep_opt.to);
    s_sweep->add_option("--count", sweep_opt.count);

    auto* s_cmp = app.add_subcommand("compare", "dynamic or static peak comparison with precision bounds");
    add_common(s_cmp, true);
    s_cmp->add_option("--mode", compare_opt.mode, "dynamic or static")->check(CLI::IsMember({"dynamic", "static"}));

    auto* s_noise = app.add_subcommand("noise", "force noise budget and integration time");
    add_common(s_noise, true);
    s_noise->add_option("--omega", noise_opt.omega, "analysis frequency in rad/s (default omega1')");
    s_noise->add_option("--points", noise_opt.points);
    s_noise->add_option("--span", noise_opt.span, "half span in gamma_eff");
    s_noise->add_option("--target-tau", noise_opt.target_tau, "report the flat S_x^E reaching this tau (s)");

    auto* s_verify = app.add_subcommand("verify", "time-domain check of the analytic response");
    add_common(s_verify, true);
    s_verify->add_option("--reduced-q", verify_opt.reduced_q, "mechanical Q used for the check");
    s_verify->add_option("--frequencies", verify_opt.frequencies);

    auto* s_derive = app.add_subcommand("derive", "derived quantities in both unit conventions");
    add_common(s_derive, true);

    auto* s_hist = app.add_subcommand("history", "historical mass-scale dataset");
    add_common(s_hist, false);
    s_hist->add_option("--category", history_opt.category, "gravity or optomechanics");
    s_hist->add_option("--year-min", history_opt.year_min);
    s_hist->add_option("--year-max", history_opt.year_max);

    std::string argv_line;
    for (int k = 0; k < argc; ++k) {
        argv_line += (k ? " " : "") + std::string(argv[k]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (auto* o = sub->get_option_no_throw("--r"); o && o->count()) common.r = r_value;
        if (auto* o = sub->get_option_no_throw("--phi"); o && o->count()) common.phi = phi_value;
        RunContext ctx(sub->get_name(), common);
        json summary;
        if (sub == s_spec) summary = cmd_spectrum(ctx, spectrum);
        else if (sub == s_sweep) summary = cmd_sweep(ctx, sweep_opt);
        else if (sub == s_cmp) summary = cmd_compare(ctx, compare_opt);
        else if (sub == s_noise) summary = cmd_noise(ctx, noise_opt);
        else if (sub == s_verify) summary = cmd_verify(ctx, verify_opt);
        else if (sub == s_derive) summary = cmd_derive(ctx);
        else summary = cmd_history(ctx, history_opt);
        ctx.finish(argv_line);
        out << summary.dump(2) << '\n';
        if (sub == s_verify && !summary.value("pass", false)) {
            err << "verify: oracle check failed\n";
            return exit_numerical;
        }
        return exit_ok;
    } catch (const CLI::Error& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    }
}

} // namespace gravomit::cli

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "coevo/scenarios.hpp"
#include "coevo/version.hpp"

namespace coevo::io {

class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw IoError("could not parse number '" + std::string(s) + "'");
    return v;
}

namespace detail {
inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// JSON representations
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const GrowthModel& m) {
    return {{"variant", std::string(m.name())}, {"K", m.K}};
}

inline GrowthModel growth_from_json(const nlohmann::json& j) {
    const auto variant = j.at("variant").get<std::string>();
    const double K = j.at("K").get<double>();
    if (variant == "logistic") return logistic_model(K);
    if (variant == "gompertz") return gompertz_model(K);
    throw IoError("unknown growth variant '" + variant + "'");
}

inline nlohmann::json to_json(const EnvironmentModel& e) {
    nlohmann::json j{{"variant", std::string(e.name())}};
    if (e.kind == EnvKind::symmetric_bimodal) j["m"] = e.m;
    if (e.kind == EnvKind::asymmetric_bimodal) {
        j["D"] = e.D;
        j["a"] = e.a;
    }
    return j;
}

inline EnvironmentModel env_from_json(const nlohmann::json& j) {
    const auto variant = j.at("variant").get<std::string>();
    if (variant == "gaussian") return gaussian_env();
    if (variant == "symmetric-bimodal") return symmetric_bimodal_env(j.at("m").get<double>());
    if (variant == "asymmetric-bimodal")
        return asymmetric_bimodal_env(j.at("D").get<double>(), j.at("a").get<double>());
    throw IoError("unknown environment variant '" + variant + "'");
}

inline nlohmann::json to_json(const CouplingRule& r) {
    nlohmann::json j{{"variant", std::string(r.name())}};
    if (r.kind == CouplingKind::heaviside_shift) {
        j["threshold"] = r.threshold;
        j["base"] = r.base;
        j["increment"] = r.increment;
    }
    return j;
}

inline CouplingRule coupling_from_json(const nlohmann::json& j) {
    const auto variant = j.at("variant").get<std::string>();
    if (variant == "fixed") return fixed_coupling();
    if (variant == "heaviside-shift")
        return heaviside_coupling(j.at("threshold").get<double>(), j.at("base").get<double>(),
                                  j.at("increment").get<double>());
    throw IoError("unknown coupling variant '" + variant + "'");
}

inline nlohmann::json to_json(const SimParams& p) {
    return {{"lambda", p.lambda}, {"gamma", p.gamma},   {"theta", p.theta},
            {"dt", p.dt},         {"t_max", p.t_max},   {"seed", p.seed},
            {"x0", p.x0},         {"y0", p.y0},         {"record_stride", p.record_stride}};
}

inline SimParams params_from_json(const nlohmann::json& j) {
    SimParams p;
    p.lambda = j.at("lambda").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.theta = j.at("theta").get<double>();
    p.dt = j.at("dt").get<double>();
    p.t_max = j.at("t_max").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.x0 = j.at("x0").get<double>();
    p.y0 = j.at("y0").get<double>();
    p.record_stride = j.at("record_stride").get<std::uint64_t>();
    return p;
}

inline nlohmann::json to_json(const ScenarioSpec& s) {
    static const char* comparison_names[] = {"none", "logistic", "gompertz"};
    return {{"name", s.name},
            {"model", to_json(s.model)},
            {"env", to_json(s.env)},
            {"rule", to_json(s.rule)},
            {"params", to_json(s.params)},
            {"comparison", comparison_names[static_cast<int>(s.comparison)]},
            {"n_runs", s.n_runs},
            {"density_comparison", s.density_comparison},
            {"density_bins", s.density_bins},
            {"density_range", {s.density_lo, s.density_hi}},
            {"transition_levels", {s.transition_low, s.transition_high}},
            {"transition_window", s.transition_window}};
}

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    ScenarioSpec s;
    s.name = j.at("name").get<std::string>();
    s.model = growth_from_json(j.at("model"));
    s.env = env_from_json(j.at("env"));
    s.rule = coupling_from_json(j.at("rule"));
    s.params = params_from_json(j.at("params"));
    const auto cmp = j.at("comparison").get<std::string>();
    s.comparison = cmp == "none"       ? ComparisonKind::none
                   : cmp == "logistic" ? ComparisonKind::logistic_ode
                                       : ComparisonKind::gompertz_ode;
    s.n_runs = j.at("n_runs").get<std::size_t>();
    s.density_comparison = j.at("density_comparison").get<bool>();
    s.density_bins = j.at("density_bins").get<std::size_t>();
    s.density_lo = j.at("density_range")[0].get<double>();
    s.density_hi = j.at("density_range")[1].get<double>();
    s.transition_low = j.at("transition_levels")[0].get<double>();
    s.transition_high = j.at("transition_levels")[1].get<double>();
    s.transition_window = j.at("transition_window").get<double>();
    return s;
}

/// Everything needed to reproduce the run bit-exactly, plus the series.
inline nlohmann::json trajectory_json(const Trajectory& traj) {
    return {{"version", std::string(version)},
            {"label", traj.label},
            {"model", to_json(traj.model)},
            {"env", to_json(traj.env)},
            {"rule", to_json(traj.rule)},
            {"params", to_json(traj.params)},
            {"t", traj.times},
            {"x", traj.xs},
            {"y", traj.ys}};
}

inline nlohmann::json density_report_json(const DensityReport& report) {
    return {{"edges", report.histogram.edges},
            {"densities", report.histogram.densities},
            {"n_samples", report.histogram.n_samples},
            {"n_below", report.histogram.n_below},
            {"n_above", report.histogram.n_above},
            {"theoretical", report.theoretical},
            {"l1_distance", report.l1_distance},
            {"ks_distance", report.ks_distance}};
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << "t,x,y\n";
    for (std::size_t i = 0; i < traj.size(); ++i)
        out << format_double(traj.times[i]) << ',' << format_double(traj.xs[i]) << ','
            << format_double(traj.ys[i]) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

/// Reads back a t,x,y series written by write_trajectory_csv (metadata is
/// not part of the CSV and stays default).
inline Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "t,x,y")
        throw IoError(path.string() + ": expected header 't,x,y'");
    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw IoError(path.string() + ": malformed row '" + line + "'");
        traj.times.push_back(parse_double(std::string_view(line).substr(0, c1)));
        traj.xs.push_back(parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1)));
        traj.ys.push_back(parse_double(std::string_view(line).substr(c2 + 1)));
    }
    return traj;
}

inline void write_density_csv(const DensityReport& report, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << "bin_lo,bin_hi,empirical,theoretical\n";
    for (std::size_t i = 0; i < report.histogram.densities.size(); ++i)
        out << format_double(report.histogram.edges[i]) << ','
            << format_double(report.histogram.edges[i + 1]) << ','
            << format_double(report.histogram.densities[i]) << ','
            << format_double(report.theoretical[i]) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

namespace detail {

struct PanelLayout {
    double x0, y0, w, h;          // plot area in svg coordinates
    double t_lo, t_hi, v_lo, v_hi;  // data ranges

    double px(double t) const { return x0 + (t - t_lo) / (t_hi - t_lo) * w; }
    double py(double v) const { return y0 + h - (v - v_lo) / (v_hi - v_lo) * h; }
};

inline void polyline(std::ostringstream& svg, const PanelLayout& panel,
                     const std::vector<double>& ts, const std::vector<double>& vs,
                     const char* color, const char* dash) {
    const std::size_t max_points = 2000;
    const std::size_t stride = std::max<std::size_t>(1, ts.size() / max_points);
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\"";
    if (dash[0] != '\0') svg << " stroke-dasharray=\"" << dash << "\"";
    svg << " points=\"";
    for (std::size_t i = 0; i < ts.size(); i += stride)
        svg << panel.px(ts[i]) << ',' << panel.py(vs[i]) << ' ';
    svg << panel.px(ts.back()) << ',' << panel.py(vs.back());
    svg << "\"/>\n";
}

inline void panel_frame(std::ostringstream& svg, const PanelLayout& p, const std::string& label) {
    svg << "<rect x=\"" << p.x0 << "\" y=\"" << p.y0 << "\" width=\"" << p.w << "\" height=\""
        << p.h << "\" fill=\"white\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << p.x0 + 4 << "\" y=\"" << p.y0 + 14 << "\" font-size=\"12\">" << label
        << "</text>\n";
    svg << "<text x=\"" << p.x0 << "\" y=\"" << p.y0 + p.h + 14 << "\" font-size=\"10\">t="
        << format_double(p.t_lo) << "</text>\n";
    svg << "<text x=\"" << p.x0 + p.w - 60 << "\" y=\"" << p.y0 + p.h + 14
        << "\" font-size=\"10\">t=" << format_double(p.t_hi) << "</text>\n";
    svg << "<text x=\"" << p.x0 + 4 << "\" y=\"" << p.y0 + p.h - 4 << "\" font-size=\"10\">"
        << format_double(p.v_lo) << ".." << format_double(p.v_hi) << "</text>\n";
}

inline std::pair<double, double> value_range(const std::vector<double>& v,
                                             const std::vector<double>* extra = nullptr) {
    double lo = v[0], hi = v[0];
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (extra)
        for (double x : *extra) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace detail

/// Line plot of x vs t (top panel) and y vs t (bottom panel, when the series
/// carries one); the optional reference trajectory is overlaid dashed.
inline std::string trajectory_svg(const Trajectory& traj, const Trajectory* reference = nullptr,
                                  const std::string& title = "") {
    const bool has_y = !traj.ys.empty() &&
                       std::any_of(traj.ys.begin(), traj.ys.end(), [](double v) { return v != 0.0; });
    const double width = 880.0;
    const double height = has_y ? 620.0 : 360.0;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"20\" y=\"20\" font-size=\"13\">" << (title.empty() ? traj.label : title)
        << "</text>\n";

    const auto [x_lo, x_hi] = detail::value_range(traj.xs, reference ? &reference->xs : nullptr);
    detail::PanelLayout top{60, 40, width - 100, has_y ? 250.0 : height - 100, traj.times.front(),
                            traj.times.back(), x_lo, x_hi};
    detail::panel_frame(svg, top, "population x(t)");
    detail::polyline(svg, top, traj.times, traj.xs, "#1f4e9c", "");
    if (reference) detail::polyline(svg, top, reference->times, reference->xs, "#c03020", "6,4");

    if (has_y) {
        const auto [y_lo, y_hi] = detail::value_range(traj.ys);
        detail::PanelLayout bottom{60, 340, width - 100, 230, traj.times.front(),
                                   traj.times.back(), y_lo, y_hi};
        detail::panel_frame(svg, bottom, "environment y(t)");
        detail::polyline(svg, bottom, traj.times, traj.ys, "#2a7a2a", "");
    }
    svg << "</svg>\n";
    return svg.str();
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

struct EmitOptions {
    bool csv = true;
    bool json = true;
    bool svg = true;
};

inline void write_text(const std::string& text, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

/// Writes one trajectory under `name` and returns the file manifest.
inline std::vector<std::filesystem::path> emit_trajectory(
    const Trajectory& traj, const std::string& name, const EmitOptions& formats,
    const std::filesystem::path& dir, const Trajectory* reference = nullptr) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::vector<std::filesystem::path> manifest;
    if (formats.csv) {
        auto p = dir / (name + ".csv");
        write_trajectory_csv(traj, p);
        manifest.push_back(p);
    }
    if (formats.json) {
        auto p = dir / (name + ".json");
        write_text(trajectory_json(traj).dump(2) + "\n", p);
        manifest.push_back(p);
    }
    if (formats.svg) {
        auto p = dir / (name + ".svg");
        write_text(trajectory_svg(traj, reference, name), p);
        manifest.push_back(p);
    }
    return manifest;
}

inline nlohmann::json scenario_report_json(const ScenarioReport& report) {
    nlohmann::json j{{"version", std::string(version)}, {"spec", to_json(report.spec)}};
    j["runs"] = nlohmann::json::array();
    for (const auto& run : report.runs) j["runs"].push_back(trajectory_json(run));
    if (report.reference) j["reference"] = trajectory_json(*report.reference);
    if (report.density) j["density"] = density_report_json(*report.density);
    j["transitions"] = nlohmann::json::array();
    for (const auto& events : report.transitions) {
        nlohmann::json per_run = nlohmann::json::array();
        for (const auto& e : events)
            per_run.push_back({{"time", e.time}, {"direction", e.direction}});
        j["transitions"].push_back(per_run);
    }
    j["window_length"] = report.spec.transition_window;
    j["window_means"] = report.window_means;
    return j;
}

/// Writes a scenario report: per-run trajectory CSV/SVG (suffixed _runN when
/// there are several), the report JSON under the scenario name, the density
/// CSV when present, and the deterministic reference CSV when present.
inline std::vector<std::filesystem::path> emit_scenario(const ScenarioReport& report,
                                                        const EmitOptions& formats,
                                                        const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::vector<std::filesystem::path> manifest;
    const std::string& name = report.spec.name;
    const Trajectory* ref = report.reference ? &*report.reference : nullptr;

    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        const std::string run_name =
            report.runs.size() == 1 ? name : name + "_run" + std::to_string(i);
        if (formats.csv) {
            auto p = dir / (run_name + ".csv");
            write_trajectory_csv(report.runs[i], p);
            manifest.push_back(p);
        }
        if (formats.svg) {
            auto p = dir / (run_name + ".svg");
            write_text(trajectory_svg(report.runs[i], ref, run_name), p);
            manifest.push_back(p);
        }
    }
    if (formats.json) {
        auto p = dir / (name + ".json");
        write_text(scenario_report_json(report).dump(2) + "\n", p);
        manifest.push_back(p);
    }
    if (formats.csv && report.reference) {
        auto p = dir / (name + "_reference.csv");
        write_trajectory_csv(*report.reference, p);
        manifest.push_back(p);
    }
    if (formats.csv && report.density) {
        auto p = dir / (name + "_hist.csv");
        write_density_csv(*report.density, p);
        manifest.push_back(p);
    }
    return manifest;
}

}  // namespace coevo::io

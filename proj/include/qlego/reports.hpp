// Copyright 2026 The QLego Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qlego/dense.hpp"
#include "qlego/fidelity.hpp"

namespace qlego {

// ---------------------------------------------------------------------------
// Channel equivalence

struct ChannelCheck {
    double delta = 0;
    double gamma = 0;          // amplitude-damping parameter D(2-D)
    double map_vs_gadget = 0;  // Choi trace distances
    double map_vs_damping = 0;
    double gadget_vs_damping = 0;
    double population = 0;     // excited population after one step from |1><1|
    double expected_population = 0;
    bool cptp = false;

    double max_distance() const { return std::max({map_vs_gadget, map_vs_damping, gadget_vs_damping}); }
    bool ok(double tol = 1e-10) const {
        return max_distance() < tol && std::abs(population - expected_population) < 1e-12 && cptp;
    }
};

inline ChannelCheck channel_check(double delta) {
    ChannelCheck c;
    c.delta = delta;
    c.gamma = delta * (2 - delta);
    auto map = relaxation_superop(delta);
    auto gadget = gadget_superop(delta);
    auto damping = amplitude_damping_superop(c.gamma);
    c.map_vs_gadget = choi_trace_distance(map, gadget);
    c.map_vs_damping = choi_trace_distance(map, damping);
    c.gadget_vs_damping = choi_trace_distance(gadget, damping);
    Eigen::Matrix2cd one = Eigen::Matrix2cd::Zero();
    one(1, 1) = 1;
    c.population = apply_superop(map, one)(1, 1).real();
    c.expected_population = (1 - delta) * (1 - delta);
    c.cptp = check_cptp(map).ok() && check_cptp(gadget).ok();
    return c;
}

inline nlohmann::ordered_json to_json(const ChannelCheck& c) {
    return {{"delta", c.delta},
            {"gamma", c.gamma},
            {"map_vs_gadget", c.map_vs_gadget},
            {"map_vs_damping", c.map_vs_damping},
            {"gadget_vs_damping", c.gadget_vs_damping},
            {"max_trace_distance", c.max_distance()},
            {"excited_population", c.population},
            {"expected_population", c.expected_population},
            {"cptp", c.cptp},
            {"ok", c.ok()}};
}

// ---------------------------------------------------------------------------
// Calibration data for the fidelity fit

/// One run per line: `N_q N_1 N_2 fraction`; `#` starts a comment.
inline std::vector<FitRun> fit_runs_from_text(const std::string& text) {
    std::vector<FitRun> runs;
    std::istringstream is(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        FitRun r;
        if (!(ls >> r.counts.qubits)) continue;
        if (!(ls >> r.counts.one_qubit >> r.counts.two_qubit >> r.fraction))
            throw ParseError("fit data line " + std::to_string(lineno) + ": expected 'N_q N_1 N_2 fraction'");
        std::string extra;
        if (ls >> extra) throw ParseError("fit data line " + std::to_string(lineno) + ": trailing text");
        runs.push_back(r);
    }
    return runs;
}

inline std::vector<FitRun> load_fit_runs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open fit data " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return fit_runs_from_text(ss.str());
}

// ---------------------------------------------------------------------------
// Static SVG plots. Output depends only on the inputs, so re-rendering the
// same data gives identical bytes.

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool connect = true;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    /// Optional horizontal reference line.
    std::optional<double> reference;
    std::string reference_label;
    /// Draw the diagonal y = x (for predicted vs observed).
    bool diagonal = false;
};

namespace detail {

inline std::string fmt(double v, int prec = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[64];
    if (v != 0 && (std::abs(v) < 1e-3 || std::abs(v) >= 1e5)) std::snprintf(buf, sizeof buf, "%.2g", v);
    else std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Round-number ticks (steps of 1, 2 or 5 times a power of ten) inside [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
    double raw = (hi - lo) / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step)
        out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return out;
}

inline const char* series_color(size_t i) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    return kColors[i % 7];
}

}  // namespace detail

inline std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    const double w = 640, h = 420, left = 70, right = 170, top = 40, bottom = 55;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (spec.reference) {
        y0 = std::min(y0, *spec.reference);
        y1 = std::max(y1, *spec.reference);
    }
    if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (spec.diagonal) {
        x0 = y0 = std::min(x0, y0);
        x1 = y1 = std::max(x1, y1);
    }
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) {
        double pad = std::max(std::abs(y0) * 0.1, 1e-3);
        y0 -= pad;
        y1 += pad;
    }
    double xpad = (x1 - x0) * 0.05, ypad = (y1 - y0) * 0.08;
    x0 -= xpad, x1 += xpad, y0 -= ypad, y1 += ypad;
    const double pw = w - left - right, ph = h - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1 - (y - y0) / (y1 - y0)) * ph; };
    using detail::fmt;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
       << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << detail::escape_xml(spec.title) << "</text>\n";
    os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double xv : detail::nice_ticks(x0, x1)) {
        os << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(px(xv)) << "\" y2=\""
           << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
           << detail::tick_label(xv) << "</text>\n";
    }
    for (double yv : detail::nice_ticks(y0, y1)) {
        os << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << fmt(left) << "\" y2=\""
           << fmt(py(yv)) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">"
           << detail::tick_label(yv) << "</text>\n";
    }
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(h - 12) << "\" text-anchor=\"middle\">"
       << detail::escape_xml(spec.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << fmt(top + ph / 2) << ")\">" << detail::escape_xml(spec.y_label) << "</text>\n";
    double ly = top + 10;
    if (spec.diagonal)
        os << "<line x1=\"" << fmt(px(x0)) << "\" y1=\"" << fmt(py(x0)) << "\" x2=\"" << fmt(px(x1)) << "\" y2=\""
           << fmt(py(x1)) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    if (spec.reference) {
        double y = py(*spec.reference);
        os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(left + pw) << "\" y2=\"" << fmt(y)
           << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
        os << "<line x1=\"" << fmt(w - right + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(w - right + 32)
           << "\" y2=\"" << fmt(ly) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
        os << "<text x=\"" << fmt(w - right + 38) << "\" y=\"" << fmt(ly + 4) << "\">"
           << detail::escape_xml(spec.reference_label) << "</text>\n";
        ly += 18;
    }
    for (size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = detail::series_color(i);
        if (s.connect && s.points.size() > 1) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (size_t j = 0; j < s.points.size(); ++j)
                os << (j ? " " : "") << fmt(px(s.points[j].first)) << ',' << fmt(py(s.points[j].second));
            os << "\"/>\n";
        }
        for (auto [x, y] : s.points)
            os << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"3.5\" fill=\"" << color
               << "\"/>\n";
        os << "<circle cx=\"" << fmt(w - right + 22) << "\" cy=\"" << fmt(ly) << "\" r=\"3.5\" fill=\"" << color
           << "\"/>\n";
        os << "<text x=\"" << fmt(w - right + 38) << "\" y=\"" << fmt(ly + 4) << "\">" << detail::escape_xml(s.label)
           << "</text>\n";
        ly += 18;
    }
    os << "</svg>\n";
    return os.str();
}

/// Best p_ND per physical qubit count, one series per run.
inline std::string pnd_vs_qubits_svg(const std::vector<PlotSeries>& runs, std::optional<double> bare_qubit) {
    PlotSpec spec{"p_ND of best code by size", "physical qubits", "p_ND", bare_qubit, "bare qubit", false};
    return render_svg(spec, runs);
}

/// Observed against predicted error-free fraction for a fitted model.
inline std::string fit_scatter_svg(const std::vector<FitRun>& runs, const FidelityModel& m) {
    PlotSeries s{"runs", {}, false};
    for (const auto& r : runs) s.points.emplace_back(m.fidelity(r.counts), r.fraction);
    PlotSpec spec{"Error-free fraction: fit vs data", "predicted F_ex", "observed fraction", std::nullopt, "", true};
    return render_svg(spec, {s});
}

}  // namespace qlego

#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "dnbody/dynamics.hpp"

namespace dnbody {

/// Renders one polyline per particle into a fixed 640x640 view box computed
/// from the data bounds. Particles sharing a trace block share a stroke
/// color. Output bytes are deterministic for fixed input.
inline void write_trajectory_svg(const Trajectory& traj, std::ostream& out,
                                 const std::vector<std::vector<int>>& blocks = {}) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#17becf", "#e377c2",
                                     "#bcbd22", "#7f7f7f"};
    const int n = traj.n();
    const int S = traj.samples();

    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool first = true;
    for (const PhaseState& st : traj.states) {
        for (const Vec2& r : st.positions) {
            if (first) { xmin = xmax = r.x; ymin = ymax = r.y; first = false; }
            xmin = std::min(xmin, r.x); xmax = std::max(xmax, r.x);
            ymin = std::min(ymin, r.y); ymax = std::max(ymax, r.y);
        }
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
    const double margin = 0.05 * span;
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double half = 0.5 * span + margin;
    const double scale = 640.0 / (2.0 * half);

    auto px = [&](double x) { return (x - (cx - half)) * scale; };
    auto py = [&](double y) { return 640.0 - (y - (cy - half)) * scale; }; // y up

    std::vector<int> color(n);
    for (int i = 0; i < n; ++i) color[i] = i % 10;
    for (size_t b = 0; b < blocks.size(); ++b)
        for (int label : blocks[b]) color[label - 1] = static_cast<int>(b % 10);

    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.3f", v);
        return std::string(buf);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
           "viewBox=\"0 0 640 640\">\n";
    out << "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
    for (int i = 0; i < n; ++i) {
        out << "<polyline fill=\"none\" stroke=\"" << kPalette[color[i]]
            << "\" stroke-width=\"1.2\" points=\"";
        for (int k = 0; k < S; ++k) {
            const Vec2& r = traj.states[k].positions[i];
            if (k) out << ' ';
            out << fmt(px(r.x)) << ',' << fmt(py(r.y));
        }
        out << "\"/>\n";
    }
    // start markers
    if (S > 0) {
        for (int i = 0; i < n; ++i) {
            const Vec2& r = traj.states.front().positions[i];
            out << "<circle cx=\"" << fmt(px(r.x)) << "\" cy=\"" << fmt(py(r.y))
                << "\" r=\"4\" fill=\"" << kPalette[color[i]] << "\"/>\n";
        }
    }
    out << "</svg>\n";
}

/// Trajectory CSV: `t,x1,y1,...,xn,yn[,px1,py1,...]`, one row per sample.
inline void write_trajectory_csv(const Trajectory& traj, std::ostream& out,
                                 bool with_momenta = false) {
    const int n = traj.n();
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",x" << i << ",y" << i;
    if (with_momenta)
        for (int i = 1; i <= n; ++i) out << ",px" << i << ",py" << i;
    out << "\n";
    char buf[40];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (int k = 0; k < traj.samples(); ++k) {
        const PhaseState& st = traj.states[k];
        out << fmt(traj.times[k]);
        for (int i = 0; i < n; ++i)
            out << ',' << fmt(st.positions[i].x) << ',' << fmt(st.positions[i].y);
        if (with_momenta)
            for (int i = 0; i < n; ++i)
                out << ',' << fmt(st.momenta[i].x) << ',' << fmt(st.momenta[i].y);
        out << "\n";
    }
}

/// Reads the CSV written by write_trajectory_csv (momenta columns optional).
inline Trajectory read_trajectory_csv(std::istream& in) {
    Trajectory traj;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, 1, "empty trajectory file");
    // header: count coordinate columns
    int columns = 0;
    for (char c : line) columns += c == ',';
    bool with_momenta = false;
    int n = columns / 2;
    if (line.find(",px") != std::string::npos) {
        with_momenta = true;
        n = columns / 4;
    }
    if (n < 1) throw ParseError(1, 1, "no particle columns in header");
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::string cur;
        auto push = [&]() {
            try {
                vals.push_back(std::stod(cur));
            } catch (const std::exception&) {
                throw ParseError(lineno, 1, "malformed number '" + cur + "'");
            }
            cur.clear();
        };
        for (char c : line) {
            if (c == ',') push();
            else cur += c;
        }
        push();
        if (static_cast<int>(vals.size()) != 1 + (with_momenta ? 4 : 2) * n)
            throw ParseError(lineno, 1, "wrong column count");
        PhaseState st;
        st.t = vals[0];
        for (int i = 0; i < n; ++i) st.positions.push_back({vals[1 + 2 * i], vals[2 + 2 * i]});
        if (with_momenta)
            for (int i = 0; i < n; ++i)
                st.momenta.push_back({vals[1 + 2 * n + 2 * i], vals[2 + 2 * n + 2 * i]});
        else
            st.momenta.assign(n, {});
        traj.times.push_back(st.t);
        traj.states.push_back(std::move(st));
    }
    if (traj.states.empty()) throw ParseError(lineno, 1, "trajectory has no rows");
    return traj;
}

} // namespace dnbody

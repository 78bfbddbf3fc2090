#pragma once

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dnbody/model.hpp"
#include "dnbody/modes.hpp"

namespace dnbody {

/// One system plus initial data, as stored in a .scn file.
///
/// Line-oriented format, `key = value`, '#' comments:
///
///   label       = six-body choreography        (optional)
///   n           = 6
///   mass        = 1
///   omega       = 1
///   convention  = listed-once | double-sum     (optional, default listed-once)
///   couplings   = 7/2, 1/2, -1                 (floor(n/2) entries, p/q or decimal)
///   eps_rel     = 1e-3                         (optional trace tolerance hint)
///   pos 3       = -1.49, -0.848705             (one line per particle, 1-based)
///   mom 3       = 4.44, -4.295486              (optional, defaults to 0, 0)
struct Scenario {
    SystemSpec spec;
    PhaseState initial;
    std::string label;
    std::optional<double> eps_rel;
};

namespace detail {

inline std::vector<std::string> split_values(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) { out.push_back(cur); cur.clear(); }
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, int line, int col) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        // accept exact-rational syntax everywhere a number is expected
        try {
            return to_double(parse_rational(s));
        } catch (const std::exception&) {
            throw ParseError(line, col, "malformed number '" + s + "'");
        }
    }
}

} // namespace detail

inline Scenario parse_scenario(std::istream& in) {
    Scenario sc;
    sc.spec.mass = 1.0;
    sc.spec.omega = 1.0;
    std::vector<std::optional<Vec2>> pos, mom;
    bool saw_n = false;

    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw ParseError(lineno, 1, "expected 'key = value'");

        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
        };
        trim(key);
        const auto value_start = value.find_first_not_of(" \t");
        const int vcol = static_cast<int>(eq) + 2 +
                         static_cast<int>(value_start == std::string::npos ? 0 : value_start);
        trim(value);
        if (value.empty()) throw ParseError(lineno, vcol, "missing value for '" + key + "'");

        auto indexed = [&](const std::string& prefix) -> std::optional<int> {
            if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0)
                return std::nullopt;
            std::string idx = key.substr(prefix.size());
            const auto a = idx.find_first_not_of(" \t");
            if (a == std::string::npos) return std::nullopt;
            idx = idx.substr(a);
            for (char c : idx)
                if (!std::isdigit(static_cast<unsigned char>(c)))
                    throw ParseError(lineno, 1, "malformed particle index in '" + key + "'");
            return std::stoi(idx);
        };

        if (key == "label") {
            sc.label = value;
        } else if (key == "n") {
            sc.spec.n = static_cast<int>(detail::parse_double(value, lineno, vcol));
            saw_n = true;
            pos.resize(sc.spec.n);
            mom.resize(sc.spec.n);
        } else if (key == "mass") {
            sc.spec.mass = detail::parse_double(value, lineno, vcol);
        } else if (key == "omega") {
            sc.spec.omega = detail::parse_double(value, lineno, vcol);
        } else if (key == "eps_rel") {
            sc.eps_rel = detail::parse_double(value, lineno, vcol);
        } else if (key == "convention") {
            if (value == "listed-once") sc.spec.convention = Convention::ListedOnce;
            else if (value == "double-sum") sc.spec.convention = Convention::DoubleSum;
            else throw ParseError(lineno, vcol, "unknown convention '" + value + "'");
        } else if (key == "couplings") {
            for (const std::string& tok : detail::split_values(value)) {
                try {
                    sc.spec.couplings.push_back(parse_rational(tok));
                } catch (const std::exception&) {
                    throw ParseError(lineno, vcol, "malformed coupling '" + tok + "'");
                }
            }
        } else if (auto i = indexed("pos")) {
            if (!saw_n) throw ParseError(lineno, 1, "'n' must come before particle data");
            if (*i < 1 || *i > sc.spec.n)
                throw ParseError(lineno, 1, "particle index " + std::to_string(*i) + " out of 1.." +
                                                std::to_string(sc.spec.n));
            auto toks = detail::split_values(value);
            if (toks.size() != 2) throw ParseError(lineno, vcol, "expected two coordinates");
            pos[*i - 1] = Vec2{detail::parse_double(toks[0], lineno, vcol),
                               detail::parse_double(toks[1], lineno, vcol)};
        } else if (auto j = indexed("mom")) {
            if (!saw_n) throw ParseError(lineno, 1, "'n' must come before particle data");
            if (*j < 1 || *j > sc.spec.n)
                throw ParseError(lineno, 1, "particle index " + std::to_string(*j) + " out of 1.." +
                                                std::to_string(sc.spec.n));
            auto toks = detail::split_values(value);
            if (toks.size() != 2) throw ParseError(lineno, vcol, "expected two coordinates");
            mom[*j - 1] = Vec2{detail::parse_double(toks[0], lineno, vcol),
                               detail::parse_double(toks[1], lineno, vcol)};
        } else {
            throw ParseError(lineno, 1, "unknown key '" + key + "'");
        }
    }

    if (!saw_n) throw ParseError(lineno, 1, "missing 'n'");
    for (int i = 0; i < sc.spec.n; ++i) {
        if (!pos[i])
            throw ParseError(lineno, 1, "missing 'pos " + std::to_string(i + 1) + "'");
        sc.initial.positions.push_back(*pos[i]);
        sc.initial.momenta.push_back(mom[i].value_or(Vec2{}));
        if (!finite(sc.initial.positions.back()) || !finite(sc.initial.momenta.back()))
            throw ParseError(lineno, 1, "non-finite particle data");
    }
    validate_spec(sc.spec);
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open scenario file '" + path + "'");
    return parse_scenario(f);
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline void serialize_scenario(const Scenario& sc, std::ostream& out) {
    if (!sc.label.empty()) out << "label = " << sc.label << "\n";
    out << "n = " << sc.spec.n << "\n";
    out << "mass = " << detail::fmt_double(sc.spec.mass) << "\n";
    out << "omega = " << detail::fmt_double(sc.spec.omega) << "\n";
    out << "convention = " << to_string(sc.spec.convention) << "\n";
    out << "couplings = ";
    for (size_t k = 0; k < sc.spec.couplings.size(); ++k)
        out << (k ? ", " : "") << format_rational(sc.spec.couplings[k]);
    out << "\n";
    if (sc.eps_rel) out << "eps_rel = " << detail::fmt_double(*sc.eps_rel) << "\n";
    for (int i = 0; i < sc.spec.n; ++i)
        out << "pos " << i + 1 << " = " << detail::fmt_double(sc.initial.positions[i].x) << ", "
            << detail::fmt_double(sc.initial.positions[i].y) << "\n";
    for (int i = 0; i < sc.spec.n; ++i)
        out << "mom " << i + 1 << " = " << detail::fmt_double(sc.initial.momenta[i].x) << ", "
            << detail::fmt_double(sc.initial.momenta[i].y) << "\n";
}

} // namespace dnbody

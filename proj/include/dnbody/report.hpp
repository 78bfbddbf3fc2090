#pragma once

#include <json.hpp>

#include <fstream>
#include <string>

#include "dnbody/resonance.hpp"
#include "dnbody/scan.hpp"
#include "dnbody/scenario.hpp"

namespace dnbody {

using nlohmann::json;

inline json to_json(const Spectrum& sp) {
    json sectors = json::array();
    for (const SectorInfo& s : sp.sectors) {
        json j{{"ell", s.ell},
               {"lambda", s.lambda},
               {"branch", to_string(s.branch)},
               {"multiplicity", s.multiplicity}};
        if (s.lambda_exact) j["lambda_exact"] = format_rational(*s.lambda_exact);
        if (s.branch == Branch::Oscillatory) j["frequency"] = s.frequency;
        if (s.branch == Branch::Hyperbolic) j["rate"] = s.rate;
        sectors.push_back(std::move(j));
    }
    return json{{"n", sp.n},
                {"omega", sp.omega},
                {"exact", sp.exact},
                {"sectors", sectors},
                {"degeneracy_groups", sp.degeneracy_groups}};
}

inline json to_json(const TraceReport& rep) {
    json blocks = json::array();
    for (const TraceBlock& b : rep.blocks) {
        blocks.push_back(json{{"members", b.members},
                              {"shift_index", b.shift_index},
                              {"shift_time", b.shift_time},
                              {"residual", b.residual},
                              {"shift_consistent", b.shift_consistent}});
    }
    json splits = json::array();
    for (const auto& [a, b] : rep.phase_split_pairs) splits.push_back(json::array({a, b}));
    return json{{"blocks", blocks},
                {"curve_distance", rep.curve_distance},
                {"phase_split_pairs", splits},
                {"single_trace", rep.single_trace},
                {"global_shift_consistent", rep.global_shift_consistent},
                {"diameter", rep.diameter},
                {"eps_abs", rep.eps_abs}};
}

inline json to_json(const Classification& c) {
    json j{{"category", to_string(c.category)},
           {"active_sectors", std::vector<int>(c.active.begin(), c.active.end())},
           {"single_effective_sector", c.single_effective_sector},
           {"spectrum", to_json(c.spectrum)}};
    if (c.profile.commensurate) {
        j["profile"] = json{{"commensurate", true},
                            {"base_frequency", c.profile.base_frequency},
                            {"ratios", c.profile.ratios},
                            {"t_min", c.profile.t_min}};
    } else {
        j["profile"] = json{{"commensurate", false}};
    }
    if (!c.merged_groups.empty()) {
        json groups = json::array();
        for (const MergedGroup& g : c.merged_groups) {
            json gj{{"labels", g.labels}, {"ratio", g.ratio}};
            if (g.chosen_label > 0) gj["chosen_label"] = g.chosen_label;
            groups.push_back(std::move(gj));
        }
        j["merged_groups"] = groups;
    }
    if (c.period) j["period"] = *c.period;
    if (c.witness_shift) j["witness_shift"] = *c.witness_shift;
    if (!c.failing_sectors.empty())
        j["failing_sectors"] = std::vector<int>(c.failing_sectors.begin(), c.failing_sectors.end());
    if (c.trace_report) j["trace"] = to_json(*c.trace_report);
    return j;
}

/// Exit code contract shared by the CLI and its tests.
inline int category_exit_code(Category c) {
    switch (c) {
    case Category::EquivariantChoreography: return 0;
    case Category::EquivariantFragmented: return 10;
    case Category::PeriodicNotEquivariant: return 11;
    case Category::Quasiperiodic: return 12;
    default: return 13; // Unbounded
    }
}

/// Parse a scan request JSON document:
/// {
///   "n": 4, "convention": "listed-once", "mass": 1, "omega": 1,
///   "axes": [{"min":0.5,"max":2,"resolution":51}, {"value":-0.5}],
///   "probe": {"type":"random","seed":7,"trials":3}
///          | {"type":"fixed","scenario":"path.scn"}
///          | {"type":"fixed","positions":[[..],..],"momenta":[[..],..]},
///   "tolerances": {"commens_rel_tol":1e-6,"eps_rel":1e-3,"samples":360,
///                  "active_rel_tol":1e-8,"max_denominator":64},
///   "cell_cap": 1000000
/// }
/// Relative scenario paths resolve against `base_dir`.
inline ScanRequest parse_scan_request(const json& j, const std::string& base_dir = ".") {
    ScanRequest rq;
    try {
        rq.n = j.at("n").get<int>();
        if (j.contains("convention")) {
            const std::string c = j["convention"].get<std::string>();
            if (c == "listed-once") rq.convention = Convention::ListedOnce;
            else if (c == "double-sum") rq.convention = Convention::DoubleSum;
            else throw Error("unknown convention '" + c + "'");
        }
        rq.mass = j.value("mass", 1.0);
        rq.omega = j.value("omega", 1.0);
        for (const json& ax : j.at("axes")) {
            ScanAxis a;
            if (ax.contains("value")) {
                a.min = a.max = ax["value"].get<double>();
                a.resolution = 1;
            } else {
                a.min = ax.at("min").get<double>();
                a.max = ax.at("max").get<double>();
                a.resolution = ax.at("resolution").get<int>();
                if (a.resolution < 2) throw Error("swept axis needs resolution >= 2");
            }
            rq.axes.push_back(a);
        }
        if (j.contains("probe")) {
            const json& p = j["probe"];
            const std::string type = p.value("type", "random");
            if (type == "random") {
                rq.probe = RandomSeeded{p.value("seed", std::uint64_t{0}), p.value("trials", 1)};
            } else if (type == "fixed") {
                FixedState fs;
                if (p.contains("scenario")) {
                    std::string path = p["scenario"].get<std::string>();
                    if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
                    fs.state = load_scenario(path).initial;
                } else {
                    for (const auto& r : p.at("positions"))
                        fs.state.positions.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
                    for (const auto& r : p.at("momenta"))
                        fs.state.momenta.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
                }
                rq.probe = std::move(fs);
            } else {
                throw Error("unknown probe type '" + type + "'");
            }
        }
        if (j.contains("tolerances")) {
            const json& t = j["tolerances"];
            rq.tolerances.active_rel_tol = t.value("active_rel_tol", rq.tolerances.active_rel_tol);
            rq.tolerances.max_denominator = t.value("max_denominator", rq.tolerances.max_denominator);
            rq.tolerances.commens_rel_tol = t.value("commens_rel_tol", rq.tolerances.commens_rel_tol);
            rq.tolerances.eps_rel = t.value("eps_rel", rq.tolerances.eps_rel);
            rq.tolerances.samples = t.value("samples", rq.tolerances.samples);
        }
        rq.cell_cap = j.value("cell_cap", rq.cell_cap);
    } catch (const json::exception& e) {
        throw ParseError(1, 1, std::string("scan request: ") + e.what());
    }
    return rq;
}

inline json to_json(const ScanResult& result) {
    json cells = json::array();
    for (const ScanCell& c : result.cells)
        cells.push_back(json{{"index", c.index},
                             {"couplings", c.couplings},
                             {"category", to_string(c.category)},
                             {"ratios", c.ratios},
                             {"histogram", c.histogram}});
    const ScanRequest& rq = result.request;
    json probe;
    if (const auto* rnd = std::get_if<RandomSeeded>(&rq.probe))
        probe = json{{"type", "random"}, {"seed", rnd->seed}, {"trials", rnd->trials}};
    else
        probe = json{{"type", "fixed"}};
    return json{{"n", rq.n},
                {"convention", to_string(rq.convention)},
                {"probe", probe},
                {"cells", cells}};
}

} // namespace dnbody

// dnbody: planar dihedral n-body oscillator lab.
//
// Subcommands: spectrum, classify, simulate, design, scan, plot.
// Exit codes: classify encodes the category (0 choreography, 10 fragmented,
// 11 not equivariant, 12 quasiperiodic, 13 unbounded); 2 = parse error,
// 3 = validation error, 4 = infeasible design.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dnbody/report.hpp"
#include "dnbody/svg.hpp"

using namespace dnbody;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInfeasible = 4;

struct TolOptions {
    std::optional<double> eps_rel, active_tol, commens_tol;
    std::optional<long long> max_den;
    std::optional<int> samples;

    void attach(CLI::App* cmd) {
        cmd->add_option("--eps-rel", eps_rel, "trace residual tolerance (relative to diameter)");
        cmd->add_option("--active-tol", active_tol, "sector activity threshold (energy fraction)");
        cmd->add_option("--commens-tol", commens_tol, "commensurability relative residual");
        cmd->add_option("--max-den", max_den, "commensurability denominator cap");
        cmd->add_option("--samples", samples, "trace sampling grid size");
    }
    Tolerances resolve(const Scenario& sc) const {
        Tolerances tol;
        if (sc.eps_rel) tol.eps_rel = *sc.eps_rel;
        if (eps_rel) tol.eps_rel = *eps_rel;
        if (active_tol) tol.active_rel_tol = *active_tol;
        if (commens_tol) tol.commens_rel_tol = *commens_tol;
        if (max_den) tol.max_denominator = *max_den;
        if (samples) tol.samples = *samples;
        return tol;
    }
};

std::string fmt(double v, const char* spec = "%.9g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

void print_spectrum(const Spectrum& sp, std::ostream& out) {
    out << "sector  lambda            frequency        mult  branch\n";
    for (const SectorInfo& s : sp.sectors) {
        std::string lam = s.lambda_exact ? format_rational(*s.lambda_exact) : fmt(s.lambda);
        std::string freq = s.branch == Branch::Oscillatory ? fmt(s.frequency)
                           : s.branch == Branch::Hyperbolic ? ("rate " + fmt(s.rate))
                                                            : std::string("-");
        char line[128];
        std::snprintf(line, sizeof line, "%-6d  %-16s  %-15s  %4d  %s", s.ell, lam.c_str(),
                      freq.c_str(), s.multiplicity, to_string(s.branch).c_str());
        out << line << "\n";
    }
    out << "degeneracy groups:";
    for (const auto& g : sp.degeneracy_groups) {
        out << " {";
        for (size_t i = 0; i < g.size(); ++i) out << (i ? "," : "") << g[i];
        out << "}";
    }
    out << "\n";
}

/// Sampling step for simulate when --dt is omitted: T_min/1e4 when the active
/// spectrum is commensurate, else 2 pi / (1e4 max Omega).
double default_dt(const SystemSpec& spec, const PhaseState& initial) {
    const Spectrum sp = stiffness_eigenvalues(spec);
    const ModeAmplitudes m = fourier_decompose(remove_com(initial), spec.n);
    const auto active = active_sectors(m, sp, spec.mass);
    std::vector<double> freqs;
    double fmax = 0.0;
    for (int ell : active) {
        if (sp.sector(ell).branch != Branch::Oscillatory) continue;
        freqs.push_back(sp.sector(ell).frequency);
        fmax = std::max(fmax, sp.sector(ell).frequency);
    }
    if (freqs.empty()) {
        for (int ell = 1; ell <= spec.n / 2; ++ell)
            fmax = std::max(fmax, std::max(sp.sector(ell).frequency, sp.sector(ell).rate));
        if (fmax == 0.0) fmax = spec.omega;
        return 2.0 * std::numbers::pi / (1e4 * fmax);
    }
    const auto prof = detect_commensurability(freqs);
    if (prof.commensurate) return prof.t_min / 1e4;
    return 2.0 * std::numbers::pi / (1e4 * fmax);
}

int cmd_spectrum(const std::string& path) {
    const Scenario sc = load_scenario(path);
    if (!sc.label.empty()) std::cout << "# " << sc.label << "\n";
    print_spectrum(stiffness_eigenvalues(sc.spec), std::cout);
    return 0;
}

int cmd_classify(const std::string& path, const TolOptions& opts, const std::string& json_out) {
    const Scenario sc = load_scenario(path);
    const Tolerances tol = opts.resolve(sc);
    const Classification c = classify(sc.spec, sc.initial, tol);

    if (!sc.label.empty()) std::cout << "# " << sc.label << "\n";
    std::cout << "category: " << to_string(c.category) << "\n";
    std::cout << "active sectors:";
    for (int ell : c.active) std::cout << ' ' << ell;
    std::cout << "\n";
    if (c.profile.commensurate) {
        std::cout << "ratios:";
        for (long long m : c.profile.ratios) std::cout << ' ' << m;
        std::cout << "  (base frequency " << fmt(c.profile.base_frequency) << ")\n";
    }
    if (c.period) std::cout << "period T = " << fmt(*c.period) << "\n";
    if (c.witness_shift) std::cout << "witness shift s = " << *c.witness_shift << "\n";
    if (!c.failing_sectors.empty()) {
        std::cout << "failing sectors:";
        for (int ell : c.failing_sectors) std::cout << ' ' << ell;
        std::cout << "\n";
    }
    if (c.trace_report) {
        std::cout << "blocks:";
        for (const TraceBlock& b : c.trace_report->blocks) {
            std::cout << " {";
            for (size_t i = 0; i < b.members.size(); ++i)
                std::cout << (i ? "," : "") << b.members[i];
            std::cout << "}";
        }
        std::cout << "\n";
        if (c.trace_report->single_trace && c.period)
            std::cout << "single trace, shift T/" << sc.spec.n << "\n";
        if (!c.trace_report->phase_split_pairs.empty())
            std::cout << "phase-split block pairs present\n";
    }

    const json j = to_json(c);
    std::cout << "```json\n" << j.dump(2) << "\n```\n";
    if (!json_out.empty()) {
        std::ofstream f(json_out);
        if (!f) throw Error("cannot write '" + json_out + "'");
        f << j.dump(2) << "\n";
    }
    return category_exit_code(c.category);
}

int cmd_simulate(const std::string& path, double t_end, std::optional<double> dt_opt,
                 const std::string& engine, const std::string& out_path, bool momenta,
                 long stride) {
    const Scenario sc = load_scenario(path);
    const double dt = dt_opt ? *dt_opt : default_dt(sc.spec, sc.initial);
    if (!(dt > 0.0)) throw NonPositiveParameter("dt must be positive");
    if (t_end < 0.0) throw NonPositiveParameter("t-end must be nonnegative");
    const long steps = std::max<long>(0, std::llround(t_end / dt));

    Trajectory traj;
    if (engine == "verlet") {
        traj = integrate_verlet(sc.spec, sc.initial, dt, std::max<long>(steps, 1), stride);
        if (steps == 0) { traj.states.resize(1); traj.times.resize(1); }
    } else {
        traj.engine = "analytic";
        traj.dt = dt;
        for (long k = 0; k <= steps; k += stride) {
            PhaseState st = analytic_state(sc.spec, sc.initial, k * dt);
            traj.times.push_back(st.t);
            traj.states.push_back(std::move(st));
        }
    }
    if (engine == "both") {
        Trajectory num = integrate_verlet(sc.spec, sc.initial, dt, std::max<long>(steps, 1), stride);
        double worst = 0.0;
        const size_t common = std::min(num.states.size(), traj.states.size());
        for (size_t k = 0; k < common; ++k)
            for (int i = 0; i < sc.spec.n; ++i)
                worst = std::max(worst, dist(num.states[k].positions[i],
                                             traj.states[k].positions[i]));
        std::cout << "max analytic/verlet deviation: " << fmt(worst, "%.3e") << "\n";
    }

    if (out_path.empty()) {
        write_trajectory_csv(traj, std::cout, momenta);
    } else {
        std::ofstream f(out_path);
        if (!f) throw Error("cannot write '" + out_path + "'");
        write_trajectory_csv(traj, f, momenta);
        std::cout << "wrote " << traj.samples() << " samples to " << out_path << "\n";
    }
    return 0;
}

int cmd_design(int n, const std::string& ratios, const std::string& convention, double omega) {
    Convention conv = Convention::ListedOnce;
    if (convention == "double-sum") conv = Convention::DoubleSum;
    else if (convention != "listed-once") throw Error("unknown convention '" + convention + "'");

    std::vector<long long> targets;
    std::string cur;
    for (char c : ratios + ":") {
        if (c == ':') {
            if (cur.empty()) throw ParseError(1, 1, "empty ratio entry");
            try {
                targets.push_back(std::stoll(cur));
            } catch (const std::exception&) {
                throw ParseError(1, 1, "malformed ratio '" + cur + "'");
            }
            cur.clear();
        } else {
            cur += c;
        }
    }

    const CouplingDesign d = design_couplings(n, conv, targets);
    std::cout << "target ratios:";
    for (long long m : targets) std::cout << ' ' << m;
    std::cout << "\nconvention: " << to_string(conv) << "\n";
    std::cout << "family: kappa(c) = c * unit";
    if (!d.homogeneous.empty()) std::cout << " + span(homogeneous)";
    std::cout << ", c > 0\n";
    auto print_vec = [&](const char* name, const std::vector<double>& v,
                         const std::vector<Rational>& exact) {
        std::cout << name << ": (";
        for (size_t i = 0; i < v.size(); ++i) {
            std::cout << (i ? ", " : "");
            if (!exact.empty()) std::cout << format_rational(exact[i]);
            else std::cout << fmt(v[i], "%.12g");
        }
        std::cout << ")\n";
    };
    print_vec("unit", d.unit, d.unit_exact);
    print_vec("sample (min Omega = omega)", d.sample, d.sample_exact);
    for (const auto& b : d.homogeneous) print_vec("homogeneous", b, {});
    // echo the spectrum of the sample
    std::vector<double> freqs;
    auto sp = stiffness_eigenvalues(make_spec(n, 1.0, omega, d.sample, conv));
    std::cout << "sample frequencies:";
    for (int ell = 1; ell <= n / 2; ++ell) std::cout << ' ' << fmt(sp.sector(ell).frequency);
    std::cout << "\n";
    return 0;
}

int cmd_scan(const std::string& request_path, const std::string& out_path,
             const std::string& json_path) {
    std::ifstream f(request_path);
    if (!f) throw Error("cannot open scan request '" + request_path + "'");
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ParseError(1, 1, std::string("scan request: ") + e.what());
    }
    std::string base_dir = ".";
    if (const auto slash = request_path.find_last_of('/'); slash != std::string::npos)
        base_dir = request_path.substr(0, slash);
    const ScanRequest rq = parse_scan_request(j, base_dir);
    const ScanResult result = run_scan(rq);

    if (out_path.empty()) {
        write_scan_csv(result, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw Error("cannot write '" + out_path + "'");
        write_scan_csv(result, out);
        std::cout << "wrote " << result.cells.size() << " cells to " << out_path << "\n";
    }
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw Error("cannot write '" + json_path + "'");
        out << to_json(result).dump(2) << "\n";
    }
    return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& partition_path,
             const std::string& out_path) {
    std::ifstream f(csv_path);
    if (!f) throw Error("cannot open trajectory '" + csv_path + "'");
    const Trajectory traj = read_trajectory_csv(f);

    std::vector<std::vector<int>> blocks;
    if (!partition_path.empty()) {
        std::ifstream pf(partition_path);
        if (!pf) throw Error("cannot open partition report '" + partition_path + "'");
        json j;
        try {
            pf >> j;
            const json& bl = j.contains("trace") ? j["trace"]["blocks"] : j["blocks"];
            for (const json& b : bl) blocks.push_back(b["members"].get<std::vector<int>>());
        } catch (const json::exception& e) {
            throw ParseError(1, 1, std::string("partition report: ") + e.what());
        }
    }
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write '" + out_path + "'");
    write_trajectory_svg(traj, out, blocks);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"planar dihedral n-body oscillator lab"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, json_out, engine = "analytic", partition_path;
    std::string ratios, convention = "listed-once", request_path, csv_path, scan_json;
    double t_end = 0.0, omega = 1.0;
    std::optional<double> dt;
    bool momenta = false;
    long stride = 1;
    int n = 0;
    TolOptions tol;

    auto* spectrum = app.add_subcommand("spectrum", "normal-mode spectrum of a scenario");
    spectrum->add_option("scenario", scenario_path, "scenario file")->required();

    auto* classify_cmd = app.add_subcommand("classify", "classify a scenario's motion");
    classify_cmd->add_option("scenario", scenario_path, "scenario file")->required();
    classify_cmd->add_option("--json-out", json_out, "write the machine report to a file");
    tol.attach(classify_cmd);

    auto* simulate = app.add_subcommand("simulate", "sample a trajectory to CSV");
    simulate->add_option("scenario", scenario_path, "scenario file")->required();
    simulate->add_option("--t-end", t_end, "end time")->required();
    simulate->add_option("--dt", dt, "time step (default: T_min/1e4)");
    simulate->add_option("--engine", engine, "analytic | verlet | both")
        ->check(CLI::IsMember({"analytic", "verlet", "both"}));
    simulate->add_option("--out", out_path, "output CSV path (default: stdout)");
    simulate->add_option("--stride", stride, "sample every k-th step");
    simulate->add_flag("--momenta", momenta, "include momentum columns");

    auto* design = app.add_subcommand("design", "solve couplings for target frequency ratios");
    design->add_option("--n", n, "particle count")->required();
    design->add_option("--ratios", ratios, "colon-separated integers, e.g. 1:2:2")->required();
    design->add_option("--convention", convention, "listed-once | double-sum");
    design->add_option("--omega", omega, "base frequency unit");

    auto* scan = app.add_subcommand("scan", "classify a coupling-space grid");
    scan->add_option("request", request_path, "scan request JSON")->required();
    scan->add_option("--out", out_path, "output CSV path (default: stdout)");
    scan->add_option("--json", scan_json, "also write a JSON map");

    auto* plot = app.add_subcommand("plot", "render a trajectory CSV as SVG");
    plot->add_option("trajectory", csv_path, "trajectory CSV")->required();
    plot->add_option("--partition", partition_path, "classification JSON for block colors");
    plot->add_option("--out", out_path, "output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectrum->parsed()) return cmd_spectrum(scenario_path);
        if (classify_cmd->parsed()) return cmd_classify(scenario_path, tol, json_out);
        if (simulate->parsed())
            return cmd_simulate(scenario_path, t_end, dt, engine, out_path, momenta, stride);
        if (design->parsed()) return cmd_design(n, ratios, convention, omega);
        if (scan->parsed()) return cmd_scan(request_path, out_path, scan_json);
        if (plot->parsed()) return cmd_plot(csv_path, partition_path, out_path);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const Infeasible& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const NTooSmall& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const BadDimension& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NonPositiveParameter& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return 0;
}

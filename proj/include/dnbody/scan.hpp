#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "dnbody/resonance.hpp"

namespace dnbody {

/// One coupling axis of a scan: either swept over a closed interval or held fixed.
struct ScanAxis {
    double min = 0.0;
    double max = 0.0;
    int resolution = 1; ///< >= 2 when swept, 1 when fixed
    bool swept() const { return resolution > 1; }
};

/// Probe that classifies each grid cell with `trials` seeded random states.
struct RandomSeeded {
    std::uint64_t seed = 0;
    int trials = 1;
};

/// Probe that classifies each grid cell with one fixed state.
struct FixedState {
    PhaseState state;
};

struct ScanRequest {
    int n = 0;
    Convention convention = Convention::ListedOnce;
    double mass = 1.0;
    double omega = 1.0;
    std::vector<ScanAxis> axes;            ///< one per coupling, floor(n/2) entries
    std::variant<RandomSeeded, FixedState> probe = RandomSeeded{};
    Tolerances tolerances{.commens_rel_tol = 1e-6, .eps_rel = 1e-3};
    long cell_cap = 1000000;
};

struct ScanCell {
    long index = 0;
    std::vector<double> couplings;
    Category category = Category::Quasiperiodic; ///< modal category under the probe
    std::string ratios;                          ///< "1:2:3" when commensurate, "-" otherwise
    std::array<int, 5> histogram{};              ///< per-category trial counts
};

struct ScanResult {
    ScanRequest request;
    std::vector<ScanCell> cells; ///< ordered by cell index
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic standard normals (Box-Muller over splitmix64), independent of
/// any library distribution implementation.
struct NormalStream {
    std::uint64_t state;
    bool have_spare = false;
    double spare = 0.0;
    explicit NormalStream(std::uint64_t seed) : state(seed) {}
    double uniform() {
        return (splitmix64(state) >> 11) * 0x1.0p-53 + 0x1.0p-54; // (0,1)
    }
    double operator()() {
        if (have_spare) { have_spare = false; return spare; }
        const double u = uniform(), v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 2.0 * std::numbers::pi * v;
        spare = r * std::sin(a);
        have_spare = true;
        return r * std::cos(a);
    }
};

inline PhaseState random_probe_state(int n, std::uint64_t seed) {
    NormalStream g(seed);
    PhaseState st;
    for (int i = 0; i < n; ++i) st.positions.push_back({g(), g()});
    for (int i = 0; i < n; ++i) st.momenta.push_back({g(), g()});
    return st;
}

inline int scan_default_samples(int n) { return n <= 6 ? 360 : default_samples(n); }

} // namespace detail

/// Classifies every grid cell under the probe policy. Deterministic for a
/// fixed request: each cell draws from its own seed stream derived from
/// (seed, cell index), so execution order cannot matter. RandomSeeded cells
/// report the modal category over the trials (ties resolved toward the more
/// cautious category, i.e. the smaller enum value).
inline ScanResult run_scan(const ScanRequest& request) {
    const int half = request.n / 2;
    if (request.n < 3) throw NTooSmall("n must be at least 3");
    if (static_cast<int>(request.axes.size()) != half)
        throw BadDimension("expected one axis per coupling");

    long cells = 1;
    for (const ScanAxis& ax : request.axes) {
        if (ax.resolution < 1 || (ax.swept() && !(ax.max >= ax.min)))
            throw NonPositiveParameter("bad axis bounds/resolution");
        if (!std::isfinite(ax.min) || !std::isfinite(ax.max))
            throw NonPositiveParameter("axis bounds must be finite");
        cells *= ax.resolution;
        if (cells > request.cell_cap) throw CellCap("grid exceeds the cell cap");
    }

    Tolerances tol = request.tolerances;
    if (tol.samples == 0) tol.samples = detail::scan_default_samples(request.n);

    ScanResult result;
    result.request = request;
    result.cells.reserve(cells);

    std::vector<int> idx(half, 0);
    for (long cell = 0; cell < cells; ++cell) {
        // cell -> multi-index, axis 0 slowest
        long rem = cell;
        for (int a = half - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % request.axes[a].resolution);
            rem /= request.axes[a].resolution;
        }
        ScanCell out;
        out.index = cell;
        for (int a = 0; a < half; ++a) {
            const ScanAxis& ax = request.axes[a];
            out.couplings.push_back(ax.swept()
                                        ? ax.min + (ax.max - ax.min) * idx[a] / (ax.resolution - 1)
                                        : ax.min);
        }
        const SystemSpec spec =
            make_spec(request.n, request.mass, request.omega, out.couplings, request.convention);

        auto tally = [&](const PhaseState& st) {
            const Classification c = classify(spec, st, tol);
            ++out.histogram[static_cast<int>(c.category)];
            if (c.profile.commensurate && out.ratios.empty()) {
                std::string r;
                for (size_t i = 0; i < c.profile.ratios.size(); ++i)
                    r += (i ? ":" : "") + std::to_string(c.profile.ratios[i]);
                out.ratios = r;
            }
        };
        if (const auto* rnd = std::get_if<RandomSeeded>(&request.probe)) {
            for (int t = 0; t < rnd->trials; ++t) {
                std::uint64_t mix = rnd->seed ^ (0x9e3779b97f4a7c15ULL * (cell + 1));
                mix ^= 0xd1342543de82ef95ULL * (t + 1);
                tally(detail::random_probe_state(request.n, mix));
            }
        } else {
            tally(std::get<FixedState>(request.probe).state);
        }
        int best = 0;
        for (int cat = 1; cat < 5; ++cat)
            if (out.histogram[cat] > out.histogram[best]) best = cat;
        out.category = static_cast<Category>(best);
        if (out.ratios.empty()) out.ratios = "-";
        result.cells.push_back(std::move(out));
    }
    return result;
}

/// CSV map: provenance header comments, then one row per cell.
inline void write_scan_csv(const ScanResult& result, std::ostream& out) {
    const ScanRequest& rq = result.request;
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };
    out << "# dnbody scan map\n";
    out << "# n=" << rq.n << " convention=" << to_string(rq.convention)
        << " mass=" << fmt(rq.mass) << " omega=" << fmt(rq.omega) << "\n";
    if (const auto* rnd = std::get_if<RandomSeeded>(&rq.probe))
        out << "# probe=random seed=" << rnd->seed << " trials=" << rnd->trials << "\n";
    else
        out << "# probe=fixed\n";
    out << "# tolerances: commens_rel_tol=" << fmt(rq.tolerances.commens_rel_tol)
        << " eps_rel=" << fmt(rq.tolerances.eps_rel)
        << " active_rel_tol=" << fmt(rq.tolerances.active_rel_tol)
        << " max_denominator=" << rq.tolerances.max_denominator << "\n";
    for (size_t a = 0; a < rq.axes.size(); ++a)
        out << "# axis kappa" << a + 1 << ": min=" << fmt(rq.axes[a].min)
            << " max=" << fmt(rq.axes[a].max) << " resolution=" << rq.axes[a].resolution << "\n";
    out << "cell";
    for (size_t a = 0; a < rq.axes.size(); ++a) out << ",kappa" << a + 1;
    out << ",category,ratios\n";
    for (const ScanCell& c : result.cells) {
        out << c.index;
        for (double k : c.couplings) out << ',' << fmt(k);
        out << ',' << to_string(c.category) << ',' << c.ratios << "\n";
    }
}

} // namespace dnbody

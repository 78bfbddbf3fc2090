#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "dnbody/dynamics.hpp"
#include "dnbody/modes.hpp"

namespace dnbody {

/// Synchronized block of particles inside a TraceReport.
struct TraceBlock {
    std::vector<int> members;      ///< 1-based particle labels, ascending
    std::vector<int> shift_index;  ///< grid shift of each member relative to members[0]
    std::vector<double> shift_time;///< the same shifts in time units
    std::vector<double> residual;  ///< max pointwise mismatch realizing the shift
    bool shift_consistent = false; ///< shifts cover {k T/b : k} exactly once each
};

/// Partition of the particles into synchronized sub-choreographies.
struct TraceReport {
    std::vector<TraceBlock> blocks;
    std::vector<std::vector<double>> curve_distance; ///< inter-block discrete Hausdorff
    std::vector<std::pair<int, int>> phase_split_pairs; ///< block pairs sharing one trace
    bool single_trace = false;
    bool global_shift_consistent = false;
    double diameter = 0.0;
    double eps_abs = 0.0; ///< the residual threshold actually applied
};

/// Grid size divisible by every block size b <= n, so candidate shifts k T/b
/// land on sample points: 2520 = lcm(1..9), scaled as 2520 * ceil(n/7) and
/// lcm-adjusted for block sizes past 9.
inline int default_samples(int n) {
    long s = 2520L * ((n + 6) / 7);
    for (int b = 2; b <= n; ++b) s = std::lcm(s, static_cast<long>(b));
    return static_cast<int>(s);
}

/// Samples the analytic flow on a uniform grid over [0, T), centre of mass
/// removed. samples must be >= 4.
inline Trajectory sample_period(const SystemSpec& spec, const PhaseState& initial,
                                double T, int samples) {
    validate_spec(spec);
    if (!(T > 0.0)) throw NonPositiveParameter("period must be positive");
    if (samples < 4) throw NonPositiveParameter("need at least 4 samples");

    const Spectrum spectrum = stiffness_eigenvalues(spec);
    ModeAmplitudes m0 = fourier_decompose(remove_com(initial), spec.n);
    m0.com_pos = {};
    m0.com_mom = {};

    Trajectory traj;
    traj.spec = spec;
    traj.engine = "analytic";
    traj.dt = T / samples;
    for (int k = 0; k < samples; ++k) {
        const double t = T * k / samples;
        ModeAmplitudes m = evolve_modes(m0, spectrum, spec.mass, t);
        PhaseState st = fourier_reconstruct(m, spec.n, initial.t + t);
        traj.times.push_back(st.t);
        traj.states.push_back(std::move(st));
    }
    return traj;
}

/// max_k | r_j(t_k) - r_i(t_{k+shift mod S}) | over the sampled grid.
/// i, j are 1-based particle labels.
inline double timeshift_residual(const Trajectory& traj, int i, int j, int shift_index) {
    const int S = traj.samples();
    const int n = traj.n();
    if (i < 1 || i > n || j < 1 || j > n) throw BadIndex("particle label out of range");
    if (shift_index < 0 || shift_index >= S) throw BadIndex("shift index out of range");
    double worst = 0.0;
    for (int k = 0; k < S; ++k) {
        const int ks = (k + shift_index) % S;
        worst = std::max(worst, dist(traj.states[k].positions[j - 1],
                                     traj.states[ks].positions[i - 1]));
    }
    return worst;
}

namespace detail {

/// Same residual with early exit once `cap` is exceeded.
inline double residual_capped(const Trajectory& traj, int i0, int j0, int shift, double cap) {
    const int S = traj.samples();
    double worst = 0.0;
    for (int k = 0; k < S; ++k) {
        const int ks = (k + shift) % S;
        const double d = dist(traj.states[k].positions[j0], traj.states[ks].positions[i0]);
        if (d > worst) {
            worst = d;
            if (worst > cap) return worst;
        }
    }
    return worst;
}

/// Candidate grid shifts: multiples of S/b for every block size b <= n that
/// divides S, plus zero (coincident particles).
inline std::vector<int> candidate_shifts(int S, int n) {
    std::set<int> c{0};
    for (int b = 2; b <= n; ++b) {
        if (S % b != 0) continue;
        for (int j = 1; j < b; ++j) c.insert(j * (S / b));
    }
    return {c.begin(), c.end()};
}

/// Discrete Hausdorff distance between two sampled point sets.
inline double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    auto one_sided = [](const std::vector<Vec2>& u, const std::vector<Vec2>& v) {
        double worst = 0.0;
        for (const Vec2& p : u) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec2& q : v) best = std::min(best, norm2(p - q));
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

} // namespace detail

/// Discrete Hausdorff distance between the traces of two blocks' representative
/// members (their first labels). Zero for identical traces. Curves are
/// compared as sampled, without modding out rigid motions.
inline double curve_distance(const Trajectory& traj, const TraceBlock& block_a,
                             const TraceBlock& block_b) {
    const int S = traj.samples();
    auto points = [&](int label) {
        std::vector<Vec2> pts(S);
        for (int k = 0; k < S; ++k) pts[k] = traj.states[k].positions[label - 1];
        return pts;
    };
    return detail::hausdorff(points(block_a.members.front()), points(block_b.members.front()));
}

/// Partitions the particles of a sampled period into synchronized blocks:
/// j ~ i when some candidate time shift maps particle i's sampled curve onto
/// particle j's within eps_rel times the configuration diameter. Blocks are
/// the connected components; per-block shifts, residuals and inter-block
/// Hausdorff distances are reported.
inline TraceReport partition(const Trajectory& traj, double T, int n, double eps_rel = 1e-6) {
    const int S = traj.samples();
    if (traj.n() != n) throw BadDimension("trajectory particle count mismatch");

    TraceReport rep;
    for (const PhaseState& st : traj.states)
        for (const Vec2& r : st.positions)
            rep.diameter = std::max(rep.diameter, norm(r));
    rep.diameter *= 2.0; // max distance from the (removed) centre, doubled
    if (rep.diameter < 1e-12)
        throw DegenerateDiameter("configuration diameter below 1e-12");
    rep.eps_abs = eps_rel * rep.diameter;

    const std::vector<int> shifts = detail::candidate_shifts(S, n);

    // best matching shift per ordered pair (i -> j), early-exit capped
    auto best_shift = [&](int i0, int j0) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int sh : shifts) {
            const double r = detail::residual_capped(traj, i0, j0, sh, std::min(best, rep.eps_abs));
            if (r < best) { best = r; arg = sh; }
        }
        return std::pair<double, int>{best, arg};
    };

    // union-find over the match relation
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) { parent[x] = parent[parent[x]]; x = parent[x]; }
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (best_shift(i, j).first <= rep.eps_abs) parent[find(i)] = find(j);

    std::vector<std::vector<int>> groups(n);
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i + 1);

    for (auto& g : groups) {
        if (g.empty()) continue;
        TraceBlock blk;
        blk.members = g;
        const int rep0 = g.front() - 1;
        for (int label : g) {
            if (label - 1 == rep0) {
                blk.shift_index.push_back(0);
                blk.shift_time.push_back(0.0);
                blk.residual.push_back(0.0);
                continue;
            }
            auto [res, sh] = best_shift(rep0, label - 1);
            blk.shift_index.push_back(sh);
            blk.shift_time.push_back(sh * (T / S));
            blk.residual.push_back(res);
        }
        // cyclic consistency: for block size b, shifts must be exactly
        // {0, S/b, 2S/b, ...} with every residue hit once
        const int b = static_cast<int>(g.size());
        blk.shift_consistent = false;
        if (S % b == 0) {
            std::vector<int> expect(b), got = blk.shift_index;
            for (int k = 0; k < b; ++k) expect[k] = k * (S / b);
            std::sort(got.begin(), got.end());
            blk.shift_consistent = (got == expect);
        }
        rep.blocks.push_back(std::move(blk));
    }
    std::sort(rep.blocks.begin(), rep.blocks.end(),
              [](const TraceBlock& a, const TraceBlock& b) { return a.members < b.members; });

    const int nb = static_cast<int>(rep.blocks.size());
    rep.curve_distance.assign(nb, std::vector<double>(nb, 0.0));
    for (int a = 0; a < nb; ++a)
        for (int b = a + 1; b < nb; ++b) {
            const double h = curve_distance(traj, rep.blocks[a], rep.blocks[b]);
            rep.curve_distance[a][b] = rep.curve_distance[b][a] = h;
            if (h <= 10.0 * rep.eps_abs) rep.phase_split_pairs.emplace_back(a, b);
        }

    rep.global_shift_consistent =
        nb == 1 && rep.blocks.front().members.size() == static_cast<size_t>(n) &&
        rep.blocks.front().shift_consistent;
    rep.single_trace = rep.global_shift_consistent;
    return rep;
}

} // namespace dnbody

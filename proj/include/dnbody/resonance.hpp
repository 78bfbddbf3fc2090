#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dnbody/model.hpp"
#include "dnbody/modes.hpp"
#include "dnbody/traces.hpp"

namespace dnbody {

/// Result of the commensurability test on a set of positive frequencies.
struct ResonanceProfile {
    bool commensurate = false;
    double base_frequency = 0.0;      ///< Omega_0
    std::vector<long long> ratios;    ///< m_ell per input frequency, gcd 1
    double t_min = 0.0;               ///< 2 pi / Omega_0
};

namespace detail {

/// Best rational approximation p/q of x >= 0 with q <= max_den
/// (continued-fraction convergents, final semiconvergent included).
inline std::pair<long long, long long> best_rational(double x, long long max_den) {
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0; // convergents k-2, k-1
    double frac = x;
    for (int it = 0; it < 64; ++it) {
        const double fa = std::floor(frac);
        if (fa > 9e17) break;
        long long a = static_cast<long long>(fa);
        if (q0 + a * q1 > max_den) {
            // largest admissible semiconvergent
            const long long a_cut = q1 == 0 ? max_den : (max_den - q0) / q1;
            if (a_cut > 0 && 2 * a_cut >= a) { // only when it improves on p1/q1
                p0 = p0 + a_cut * p1;
                q0 = q0 + a_cut * q1;
            }
            break;
        }
        const long long p2 = p0 + a * p1;
        const long long q2 = q0 + a * q1;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        const double rem = frac - fa;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    // p1/q1 is the last full convergent; p0/q0 may hold a semiconvergent
    if (q1 != 0 && q1 <= max_den) {
        if (q0 == 0 || std::abs(x - double(p1) / q1) <= std::abs(x - double(p0) / q0))
            return {p1, q1};
    }
    return {p0, std::max<long long>(q0, 1)};
}

} // namespace detail

/// Detects a common base frequency: frequencies[i] = m_i * Omega_0 with
/// integer m_i (gcd 1), via continued-fraction approximation of the ratios to
/// the smallest frequency. Denominators are capped by max_denominator and
/// every frequency must satisfy |f - m Omega_0| <= rel_tol * f.
inline ResonanceProfile detect_commensurability(const std::vector<double>& frequencies,
                                                long long max_denominator = 64,
                                                double rel_tol = 1e-9) {
    ResonanceProfile prof;
    if (frequencies.empty()) return prof;
    for (double f : frequencies)
        if (!(f > 0.0)) throw NonPositiveParameter("frequencies must be positive");

    const double fref = *std::min_element(frequencies.begin(), frequencies.end());
    std::vector<long long> nums, dens;
    long long L = 1;
    for (double f : frequencies) {
        auto [p, q] = detail::best_rational(f / fref, max_denominator);
        if (p <= 0 || q <= 0 || std::abs(f / fref - double(p) / q) > rel_tol * (f / fref))
            return prof; // not commensurate at this cap/tolerance
        nums.push_back(p);
        dens.push_back(q);
        L = std::lcm(L, q);
    }
    std::vector<long long> m(frequencies.size());
    for (size_t i = 0; i < m.size(); ++i) m[i] = nums[i] * (L / dens[i]);
    long long g = 0;
    for (long long v : m) g = std::gcd(g, v);
    for (long long& v : m) v /= g;

    // base frequency from the reference entry, then validate all
    size_t iref = 0;
    while (frequencies[iref] != fref) ++iref;
    const double omega0 = fref / static_cast<double>(m[iref]);
    for (size_t i = 0; i < m.size(); ++i)
        if (std::abs(frequencies[i] - static_cast<double>(m[i]) * omega0) > rel_tol * frequencies[i])
            return prof;

    prof.commensurate = true;
    prof.ratios = std::move(m);
    prof.base_frequency = omega0;
    prof.t_min = 2.0 * std::numbers::pi / omega0;
    return prof;
}

/// Degeneracy-merged effective sector: one or more Fourier labels sharing an
/// eigenspace, carrying one integer frequency ratio.
struct MergedGroup {
    std::vector<int> labels;   ///< admissible C_n labels (sector indices)
    long long ratio = 0;       ///< integer frequency ratio m_G
    int chosen_label = 0;      ///< label that satisfied the congruence (set by phase_matching)
};

/// Restricts the spectrum's degeneracy groups to the active sectors and
/// attaches each group's integer ratio from the profile.
inline std::vector<MergedGroup> merge_degenerate(const Spectrum& spectrum,
                                                 const std::set<int>& active,
                                                 const ResonanceProfile& profile) {
    // profile.ratios is indexed by the ascending active set
    std::vector<int> act(active.begin(), active.end());
    std::vector<MergedGroup> out;
    for (const auto& group : spectrum.degeneracy_groups) {
        MergedGroup g;
        for (int ell : group)
            if (active.count(ell)) g.labels.push_back(ell);
        if (g.labels.empty()) continue;
        const auto it = std::find(act.begin(), act.end(), g.labels.front());
        g.ratio = profile.ratios.at(static_cast<size_t>(it - act.begin()));
        out.push_back(std::move(g));
    }
    return out;
}

/// Outcome of the sectorwise phase-matching search.
struct PhaseMatchResult {
    bool pass = false;
    int witness_shift = 0;            ///< least s in 1..n with all congruences satisfied
    double period = 0.0;              ///< s * T_min
    std::set<int> failing_sectors;    ///< labels of groups failing at the best s
    std::vector<MergedGroup> groups;  ///< with chosen_label filled in
};

/// Exact integer form of the equivariance criterion: a common witness
/// s in {1..n} (candidate period T = s T_min) such that every merged group G
/// has some label ell with  m_G * s = ell (mod n). The congruences are
/// periodic in s with period dividing n, so the sweep is exhaustive.
inline PhaseMatchResult phase_matching(const ResonanceProfile& profile,
                                       std::vector<MergedGroup> groups, int n) {
    if (!profile.commensurate) throw NotCommensurate("phase matching needs a commensurate profile");
    PhaseMatchResult res;
    res.groups = std::move(groups);

    int best_s = 1;
    size_t best_fail = res.groups.size() + 1;
    std::vector<int> best_choice;
    for (int s = 1; s <= n; ++s) {
        size_t fails = 0;
        std::vector<int> choice(res.groups.size(), 0);
        for (size_t gi = 0; gi < res.groups.size(); ++gi) {
            bool ok = false;
            for (int ell : res.groups[gi].labels) {
                if (((res.groups[gi].ratio * s - ell) % n + n) % n == 0) {
                    choice[gi] = ell;
                    ok = true;
                    break;
                }
            }
            if (!ok) ++fails;
        }
        if (fails < best_fail) {
            best_fail = fails;
            best_s = s;
            best_choice = choice;
            if (fails == 0) break; // least witness found
        }
    }
    for (size_t gi = 0; gi < res.groups.size(); ++gi)
        res.groups[gi].chosen_label = best_choice.empty() ? 0 : best_choice[gi];
    res.witness_shift = best_s;
    res.period = best_s * profile.t_min;
    if (best_fail == 0) {
        res.pass = true;
    } else {
        for (size_t gi = 0; gi < res.groups.size(); ++gi)
            if (best_choice[gi] == 0)
                res.failing_sectors.insert(res.groups[gi].labels.begin(),
                                           res.groups[gi].labels.end());
    }
    return res;
}

enum class Category {
    Unbounded,
    Quasiperiodic,
    PeriodicNotEquivariant,
    EquivariantFragmented,
    EquivariantChoreography,
};

inline std::string to_string(Category c) {
    switch (c) {
    case Category::Unbounded: return "Unbounded";
    case Category::Quasiperiodic: return "Quasiperiodic";
    case Category::PeriodicNotEquivariant: return "PeriodicNotEquivariant";
    case Category::EquivariantFragmented: return "EquivariantFragmented";
    default: return "EquivariantChoreography";
    }
}

/// Knobs of the classification pipeline.
struct Tolerances {
    double active_rel_tol = 1e-8;   ///< sector-energy activity threshold
    long long max_denominator = 64; ///< commensurability search cap
    double commens_rel_tol = 1e-9;  ///< commensurability relative residual
    double eps_rel = 1e-6;          ///< trace residual, relative to diameter
    int samples = 0;                ///< 0 = default_samples(n)
};

/// Full verdict for one scenario.
struct Classification {
    Category category = Category::Quasiperiodic;
    std::set<int> active;
    std::vector<MergedGroup> merged_groups;
    ResonanceProfile profile;
    std::optional<double> period;
    std::optional<int> witness_shift;
    std::set<int> failing_sectors;
    std::optional<TraceReport> trace_report;
    bool single_effective_sector = false; ///< advisory: one merged group active
    Spectrum spectrum;
};

/// Decision pipeline: spectrum -> active sectors -> commensurability ->
/// degeneracy merge + phase matching -> trace partition at the witness period.
///
/// Neutral or hyperbolic sectors carrying amplitude classify as Unbounded
/// (linear drift or exponential growth breaks periodicity).
inline Classification classify(const SystemSpec& spec, const PhaseState& initial,
                               const Tolerances& tol = {}) {
    validate_spec(spec);
    Classification out;
    out.spectrum = stiffness_eigenvalues(spec);
    const int n = spec.n;

    const ModeAmplitudes modes = fourier_decompose(remove_com(initial), n);

    // excitation measure that works for every branch: unit-stiffness energy
    auto excitation = [&](int ell) {
        const double om2 = spec.omega * spec.omega;
        auto q = [&](const Vec2& A, const Vec2& B) {
            return norm2(B) / (2.0 * spec.mass) + 0.5 * spec.mass * om2 * norm2(A);
        };
        if (modes.has_nyquist() && ell == n / 2) return q(modes.nyq_pos, modes.nyq_mom);
        return q(modes.cos_pos[ell - 1], modes.cos_mom[ell - 1]) +
               q(modes.sin_pos[ell - 1], modes.sin_mom[ell - 1]);
    };
    double total_q = 0.0;
    for (int ell = 1; ell <= n / 2; ++ell) total_q += excitation(ell);

    // (i) unbounded: hyperbolic sector with amplitude, or neutral sector with
    // momentum (linear drift). A static neutral offset carries no energy and
    // is left to the geometric trace analysis.
    if (total_q > 0.0) {
        for (int ell = 1; ell <= n / 2; ++ell) {
            const Branch br = out.spectrum.sector(ell).branch;
            bool runaway = false;
            if (br == Branch::Hyperbolic) {
                runaway = excitation(ell) > tol.active_rel_tol * total_q;
            } else if (br == Branch::Neutral) {
                const double drift =
                    (modes.has_nyquist() && ell == n / 2)
                        ? norm2(modes.nyq_mom) / (2.0 * spec.mass)
                        : (norm2(modes.cos_mom[ell - 1]) + norm2(modes.sin_mom[ell - 1])) /
                              (2.0 * spec.mass);
                runaway = drift > tol.active_rel_tol * total_q;
            }
            if (runaway) {
                out.category = Category::Unbounded;
                out.active.insert(ell);
            }
        }
        if (out.category == Category::Unbounded) return out;
    }

    // (ii) active oscillatory sectors by energy share
    out.active = active_sectors(modes, out.spectrum, spec.mass, tol.active_rel_tol);
    if (out.active.empty()) {
        // zero internal motion: every particle rests at the centre of mass;
        // degenerate single-trace case, no finite period to report
        out.category = Category::EquivariantChoreography;
        out.witness_shift = n;
        return out;
    }

    // (iii) commensurability over the active frequencies
    std::vector<double> freqs;
    for (int ell : out.active) freqs.push_back(out.spectrum.sector(ell).frequency);
    out.profile = detect_commensurability(freqs, tol.max_denominator, tol.commens_rel_tol);
    if (!out.profile.commensurate) {
        out.category = Category::Quasiperiodic;
        return out;
    }

    // (iv) degeneracy merge + phase matching
    out.merged_groups = merge_degenerate(out.spectrum, out.active, out.profile);
    out.single_effective_sector = out.merged_groups.size() == 1;
    PhaseMatchResult pm = phase_matching(out.profile, out.merged_groups, n);
    out.merged_groups = pm.groups;
    if (!pm.pass) {
        out.category = Category::PeriodicNotEquivariant;
        out.failing_sectors = pm.failing_sectors;
        out.period = out.profile.t_min; // motion is still T_min-periodic
        return out;
    }
    out.witness_shift = pm.witness_shift;
    out.period = pm.period;

    // (v) geometric trace partition decides choreography vs fragmentation
    const int samples = tol.samples > 0 ? tol.samples : default_samples(n);
    const Trajectory traj = sample_period(spec, initial, pm.period, samples);
    out.trace_report = partition(traj, pm.period, n, tol.eps_rel);
    out.category = out.trace_report->single_trace ? Category::EquivariantChoreography
                                                  : Category::EquivariantFragmented;
    return out;
}

// ---------------------------------------------------------------------------
// Inverse problem: couplings from prescribed frequency ratios.
// ---------------------------------------------------------------------------

/// Affine solution family of lambda_ell(kappa) = m_ell^2 c, c > 0 free:
///   kappa(c) = c * unit + span(homogeneous).
struct CouplingDesign {
    std::vector<double> unit;    ///< kappa with lambda_ell = m_ell^2 exactly
    std::vector<double> sample;  ///< unit scaled so min Omega = omega
    std::vector<std::vector<double>> homogeneous; ///< kernel basis (usually empty)
    std::vector<Rational> unit_exact;   ///< present for n in {3,4,6}
    std::vector<Rational> sample_exact;
    bool exact = false;
};

namespace detail {

/// Solve M x = v by Gaussian elimination over field F; returns particular
/// solution and kernel basis, or empty optional when inconsistent.
template <typename F>
std::optional<std::pair<std::vector<F>, std::vector<std::vector<F>>>>
solve_linear(std::vector<std::vector<F>> M, std::vector<F> v,
             auto is_zero) {
    const int rows = static_cast<int>(M.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(M[0].size());
    std::vector<int> pivot_col(rows, -1);
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int k = r; k < rows; ++k)
            if (!is_zero(M[k][c])) { piv = k; break; }
        if (piv < 0) continue;
        std::swap(M[piv], M[r]);
        std::swap(v[piv], v[r]);
        const F d = M[r][c];
        for (int cc = c; cc < cols; ++cc) M[r][cc] = M[r][cc] / d;
        v[r] = v[r] / d;
        for (int k = 0; k < rows; ++k) {
            if (k == r || is_zero(M[k][c])) continue;
            const F f = M[k][c];
            for (int cc = c; cc < cols; ++cc) M[k][cc] = M[k][cc] - f * M[r][cc];
            v[k] = v[k] - f * v[r];
        }
        pivot_col[r] = c;
        ++r;
    }
    for (int k = r; k < rows; ++k)
        if (!is_zero(v[k])) return std::nullopt; // inconsistent
    std::vector<F> x(cols, F(0));
    std::vector<bool> is_pivot(cols, false);
    for (int k = 0; k < r; ++k) { x[pivot_col[k]] = v[k]; is_pivot[pivot_col[k]] = true; }
    std::vector<std::vector<F>> kernel;
    for (int c = 0; c < cols; ++c) {
        if (is_pivot[c]) continue;
        std::vector<F> b(cols, F(0));
        b[c] = F(1);
        for (int k = 0; k < r; ++k) b[pivot_col[k]] = -M[k][c];
        kernel.push_back(std::move(b));
    }
    return std::make_pair(std::move(x), std::move(kernel));
}

} // namespace detail

/// Solves the linear system lambda_ell(kappa) = m_ell^2 c for the target
/// integer ratios, with the overall scale c > 0 free. The returned sample is
/// normalized so the smallest frequency equals omega (c = 1/min(m)^2).
/// Rational arithmetic for n in {3,4,6}. Throws Infeasible when no c > 0
/// solution exists (targets < 1, or targets outside the range of the
/// stiffness map).
inline CouplingDesign design_couplings(int n, Convention convention,
                                       const std::vector<long long>& targets) {
    if (n < 3) throw NTooSmall("n must be at least 3");
    const int half = n / 2;
    if (static_cast<int>(targets.size()) != half)
        throw BadDimension("expected " + std::to_string(half) + " target ratios");
    for (long long t : targets)
        if (t < 1) throw Infeasible("target ratios must be positive integers");

    const long long mmin = *std::min_element(targets.begin(), targets.end());
    CouplingDesign out;
    out.exact = detail::cosines_rational(n);

    if (out.exact) {
        std::vector<std::vector<Rational>> M(half, std::vector<Rational>(half));
        std::vector<Rational> v(half);
        for (int ell = 1; ell <= half; ++ell) {
            for (int k = 1; k <= half; ++k) {
                if (n % 2 == 0 && k == half) {
                    Rational c = ell % 2 == 0 ? Rational(1) : Rational(-1);
                    M[ell - 1][k - 1] = Rational(1) - c;
                    if (convention == Convention::DoubleSum) M[ell - 1][k - 1] *= 2;
                } else {
                    M[ell - 1][k - 1] =
                        Rational(2) - 2 * *rational_cos_two_pi(BigInt(static_cast<long long>(k) * ell), BigInt(n));
                }
            }
            v[ell - 1] = Rational(targets[ell - 1]) * targets[ell - 1];
        }
        auto sol = detail::solve_linear<Rational>(M, v, [](const Rational& x) { return x == 0; });
        if (!sol) throw Infeasible("target ratios outside the range of the stiffness map");
        out.unit_exact = sol->first;
        const Rational scale = Rational(1, mmin * mmin);
        for (const Rational& u : out.unit_exact) {
            out.sample_exact.push_back(u * scale);
            out.unit.push_back(to_double(u));
            out.sample.push_back(to_double(u * scale));
        }
        for (auto& b : sol->second) {
            std::vector<double> bd;
            for (const Rational& x : b) bd.push_back(to_double(x));
            out.homogeneous.push_back(std::move(bd));
        }
        return out;
    }

    std::vector<std::vector<double>> M(half, std::vector<double>(half));
    std::vector<double> v(half);
    for (int ell = 1; ell <= half; ++ell) {
        for (int k = 1; k <= half; ++k) {
            if (n % 2 == 0 && k == half) {
                M[ell - 1][k - 1] = 1.0 - std::cos(std::numbers::pi * ell);
                if (convention == Convention::DoubleSum) M[ell - 1][k - 1] *= 2.0;
            } else {
                M[ell - 1][k - 1] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k * ell / n);
            }
        }
        v[ell - 1] = static_cast<double>(targets[ell - 1]) * targets[ell - 1];
    }
    auto sol = detail::solve_linear<double>(M, v, [](double x) { return std::abs(x) < 1e-12; });
    if (!sol) throw Infeasible("target ratios outside the range of the stiffness map");
    out.unit = sol->first;
    const double scale = 1.0 / static_cast<double>(mmin * mmin);
    for (double u : out.unit) out.sample.push_back(u * scale);
    out.homogeneous = sol->second;
    return out;
}

} // namespace dnbody

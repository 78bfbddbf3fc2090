#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "dnbody/errors.hpp"
#include "dnbody/rational.hpp"

namespace dnbody {

/// How the opposite-vertex bond (k = n/2, even n) is counted in the potential.
/// ListedOnce writes each opposite pair once; DoubleSum runs the uniform
/// double sum in which those bonds appear twice. Physically identical systems
/// differ by a factor 2 in kappa_{n/2}. Odd n is unaffected.
enum class Convention { ListedOnce, DoubleSum };

inline std::string to_string(Convention c) {
    return c == Convention::ListedOnce ? "listed-once" : "double-sum";
}

/// Planar n-body system with dihedral-invariant quadratic pairwise couplings.
///
/// H = sum p_i^2/(2m) + (m w^2/2) sum_k kappa_k sum_bonds |r_i - r_{i+k}|^2
///
/// Couplings are kept as exact rationals; kappa(k) gives the double view.
struct SystemSpec {
    int n = 0;
    double mass = 1.0;
    double omega = 1.0;
    std::vector<Rational> couplings; // kappa_1 .. kappa_{floor(n/2)}
    Convention convention = Convention::ListedOnce;

    double kappa(int k) const { return to_double(couplings[k - 1]); }
    int coupling_count() const { return n / 2; }
};

inline SystemSpec make_spec(int n, double mass, double omega,
                            std::vector<Rational> couplings,
                            Convention conv = Convention::ListedOnce) {
    SystemSpec s;
    s.n = n;
    s.mass = mass;
    s.omega = omega;
    s.couplings = std::move(couplings);
    s.convention = conv;
    return s;
}

/// Exact rational value of a finite double (every double is p/2^e).
inline Rational exact_rational(double v) {
    int exp = 0;
    const double m = std::frexp(v, &exp); // v = m * 2^exp, |m| in [0.5,1)
    const long long mant = static_cast<long long>(std::ldexp(m, 53));
    exp -= 53;
    Rational r(mant, 1);
    if (exp > 0) r *= Rational(pow(BigInt(2), static_cast<unsigned>(exp)), 1);
    if (exp < 0) r /= Rational(pow(BigInt(2), static_cast<unsigned>(-exp)), 1);
    return r;
}

inline SystemSpec make_spec(int n, double mass, double omega,
                            const std::vector<double>& couplings,
                            Convention conv = Convention::ListedOnce) {
    std::vector<Rational> ks;
    ks.reserve(couplings.size());
    for (double k : couplings) ks.push_back(exact_rational(k));
    return make_spec(n, mass, omega, std::move(ks), conv);
}

/// Checks the SystemSpec invariants and returns the spec unchanged.
inline const SystemSpec& validate_spec(const SystemSpec& spec) {
    if (spec.n < 3) throw NTooSmall("n must be at least 3, got " + std::to_string(spec.n));
    if (static_cast<int>(spec.couplings.size()) != spec.n / 2)
        throw BadDimension("expected " + std::to_string(spec.n / 2) + " couplings for n=" +
                           std::to_string(spec.n) + ", got " + std::to_string(spec.couplings.size()));
    if (!(spec.mass > 0.0)) throw NonPositiveParameter("mass must be positive");
    if (!(spec.omega > 0.0)) throw NonPositiveParameter("omega must be positive");
    return spec;
}

/// Rescales kappa_{n/2} so that `spec` describes the same physical system in
/// the target convention. Round trips are exact (rational arithmetic).
inline SystemSpec convert_convention(SystemSpec spec, Convention target) {
    validate_spec(spec);
    if (spec.convention == target || spec.n % 2 != 0) {
        spec.convention = target;
        return spec;
    }
    Rational& opp = spec.couplings[spec.n / 2 - 1];
    if (target == Convention::ListedOnce)
        opp *= 2; // DoubleSum counted each opposite bond twice
    else
        opp /= 2;
    spec.convention = target;
    return spec;
}

enum class Branch { Oscillatory, Neutral, Hyperbolic };

inline std::string to_string(Branch b) {
    switch (b) {
    case Branch::Oscillatory: return "oscillatory";
    case Branch::Neutral: return "neutral";
    default: return "hyperbolic";
    }
}

/// One Fourier sector of the normal-mode spectrum.
struct SectorInfo {
    int ell = 0;                          ///< sector index, 0..floor(n/2)
    double lambda = 0.0;                  ///< dimensionless stiffness eigenvalue
    std::optional<Rational> lambda_exact; ///< present when n in {3,4,6} and couplings rational
    double frequency = 0.0;               ///< omega*sqrt(lambda) for lambda >= 0, else 0
    double rate = 0.0;                    ///< omega*sqrt(-lambda) for lambda < 0, else 0
    Branch branch = Branch::Neutral;
    int multiplicity = 2;                 ///< 1 for ell = 0 and the Nyquist sector
};

/// Full normal-mode spectrum of a SystemSpec.
struct Spectrum {
    int n = 0;
    double omega = 0.0;
    bool exact = false;
    std::vector<SectorInfo> sectors;               ///< indexed by ell
    std::vector<std::vector<int>> degeneracy_groups; ///< partition of {1..floor(n/2)} by frequency

    const SectorInfo& sector(int ell) const { return sectors[ell]; }
    int internal_count() const { return n / 2; }
};

namespace detail {

/// lambda_ell under the ListedOnce convention:
///   sum_{k<n/2} kappa_k (2 - 2cos(2 pi k ell / n)) + [n even] kappa_{n/2} (1 - cos(pi ell))
inline double lambda_float(const SystemSpec& canon, int ell) {
    const int n = canon.n;
    double s = 0.0;
    for (int k = 1; k <= (n - 1) / 2; ++k)
        s += canon.kappa(k) * (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k * ell / n));
    if (n % 2 == 0)
        s += canon.kappa(n / 2) * (1.0 - std::cos(std::numbers::pi * ell));
    return s;
}

inline Rational lambda_exact(const SystemSpec& canon, int ell) {
    const int n = canon.n;
    Rational s = 0;
    for (int k = 1; k <= (n - 1) / 2; ++k) {
        const Rational c = *rational_cos_two_pi(BigInt(static_cast<long long>(k) * ell), BigInt(n));
        s += canon.couplings[k - 1] * (Rational(2) - 2 * c);
    }
    if (n % 2 == 0) {
        const Rational c = ell % 2 == 0 ? Rational(1) : Rational(-1); // cos(pi ell)
        s += canon.couplings[n / 2 - 1] * (Rational(1) - c);
    }
    return s;
}

inline bool cosines_rational(int n) { return n == 3 || n == 4 || n == 6; }

} // namespace detail

/// Stiffness eigenvalues, frequencies and degeneracy structure, sector by
/// sector. Exact rational eigenvalues are attached for n in {3,4,6}; the
/// degeneracy grouping then uses exact equality, otherwise a relative
/// frequency tolerance of 1e-9.
inline Spectrum stiffness_eigenvalues(const SystemSpec& spec) {
    validate_spec(spec);
    const SystemSpec canon = convert_convention(spec, Convention::ListedOnce);
    const int n = canon.n;
    const int half = n / 2;

    Spectrum out;
    out.n = n;
    out.omega = canon.omega;
    out.exact = detail::cosines_rational(n);

    for (int ell = 0; ell <= half; ++ell) {
        SectorInfo s;
        s.ell = ell;
        if (out.exact) {
            s.lambda_exact = ell == 0 ? Rational(0) : detail::lambda_exact(canon, ell);
            s.lambda = to_double(*s.lambda_exact);
        } else {
            s.lambda = ell == 0 ? 0.0 : detail::lambda_float(canon, ell);
        }
        if (ell == 0) s.lambda = 0.0; // exact zero mode by construction
        if (s.lambda > 0.0) {
            s.branch = Branch::Oscillatory;
            s.frequency = canon.omega * std::sqrt(s.lambda);
        } else if (s.lambda < 0.0) {
            s.branch = Branch::Hyperbolic;
            s.rate = canon.omega * std::sqrt(-s.lambda);
        } else {
            s.branch = Branch::Neutral;
        }
        s.multiplicity = (ell == 0 || (n % 2 == 0 && ell == half)) ? 1 : 2;
        out.sectors.push_back(std::move(s));
    }

    // group internal sectors by frequency coincidence
    std::vector<bool> used(half + 1, false);
    double max_freq = 0.0;
    for (int ell = 1; ell <= half; ++ell)
        max_freq = std::max(max_freq, std::max(out.sectors[ell].frequency, out.sectors[ell].rate));
    const double tol = 1e-9 * std::max(max_freq, 1e-300);
    auto same = [&](int a, int b) {
        const SectorInfo& sa = out.sectors[a];
        const SectorInfo& sb = out.sectors[b];
        if (out.exact) return *sa.lambda_exact == *sb.lambda_exact;
        if (sa.branch != sb.branch) return false;
        const double ka = sa.branch == Branch::Hyperbolic ? sa.rate : sa.frequency;
        const double kb = sb.branch == Branch::Hyperbolic ? sb.rate : sb.frequency;
        return std::abs(ka - kb) <= tol;
    };
    for (int ell = 1; ell <= half; ++ell) {
        if (used[ell]) continue;
        std::vector<int> group{ell};
        used[ell] = true;
        for (int k = ell + 1; k <= half; ++k)
            if (!used[k] && same(ell, k)) { group.push_back(k); used[k] = true; }
        out.degeneracy_groups.push_back(std::move(group));
    }
    return out;
}

} // namespace dnbody

#pragma once

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "dnbody/geometry.hpp"
#include "dnbody/model.hpp"

namespace dnbody {

/// Instantaneous state of the n particles.
struct PhaseState {
    double t = 0.0;
    std::vector<Vec2> positions;
    std::vector<Vec2> momenta;

    int n() const { return static_cast<int>(positions.size()); }
};

/// Symmetry-adapted amplitudes: the orthonormal real DFT of a PhaseState.
///
/// Sector ell = 0 is the centre of mass; each 0 < ell < n/2 is a planar
/// cosine/sine doublet; even n adds the one-dimensional alternating Nyquist
/// sector ell = n/2.
struct ModeAmplitudes {
    int n = 0;
    Vec2 com_pos, com_mom;
    std::vector<Vec2> cos_pos, sin_pos; ///< indexed ell-1, ell = 1..ceil(n/2)-1
    std::vector<Vec2> cos_mom, sin_mom;
    Vec2 nyq_pos, nyq_mom;              ///< even n only

    bool has_nyquist() const { return n % 2 == 0; }
    int doublet_count() const { return (n - 1) / 2; }
};

namespace detail {

/// theta_j = 2 pi (j-1)/n, j = 1..n (matching the 1-based particle labels).
inline double theta(int n, int j) { return 2.0 * std::numbers::pi * (j - 1) / n; }

} // namespace detail

/// Orthonormal real DFT of positions and momenta:
///   com    = (1/sqrt n) sum r_j
///   cos_l  = sqrt(2/n) sum r_j cos(l theta_j),  sin_l likewise
///   nyq    = (1/sqrt n) sum (-1)^{j-1} r_j      (even n)
inline ModeAmplitudes fourier_decompose(const PhaseState& state, int n) {
    if (state.n() != n || static_cast<int>(state.momenta.size()) != n)
        throw BadDimension("state does not hold " + std::to_string(n) + " particles");
    ModeAmplitudes m;
    m.n = n;
    const double cnorm = 1.0 / std::sqrt(static_cast<double>(n));
    const double dnorm = std::sqrt(2.0 / n);
    for (int j = 1; j <= n; ++j) {
        m.com_pos += cnorm * state.positions[j - 1];
        m.com_mom += cnorm * state.momenta[j - 1];
    }
    for (int ell = 1; ell <= (n - 1) / 2; ++ell) {
        Vec2 cp, sp, cm, sm;
        for (int j = 1; j <= n; ++j) {
            const double a = ell * detail::theta(n, j);
            const double c = std::cos(a), s = std::sin(a);
            cp += dnorm * c * state.positions[j - 1];
            sp += dnorm * s * state.positions[j - 1];
            cm += dnorm * c * state.momenta[j - 1];
            sm += dnorm * s * state.momenta[j - 1];
        }
        m.cos_pos.push_back(cp); m.sin_pos.push_back(sp);
        m.cos_mom.push_back(cm); m.sin_mom.push_back(sm);
    }
    if (n % 2 == 0) {
        for (int j = 1; j <= n; ++j) {
            const double sign = (j % 2 == 1) ? 1.0 : -1.0;
            m.nyq_pos += cnorm * sign * state.positions[j - 1];
            m.nyq_mom += cnorm * sign * state.momenta[j - 1];
        }
    }
    return m;
}

/// Inverse of fourier_decompose (the transform is orthogonal).
inline PhaseState fourier_reconstruct(const ModeAmplitudes& m, int n, double t = 0.0) {
    PhaseState st;
    st.t = t;
    st.positions.assign(n, {});
    st.momenta.assign(n, {});
    const double cnorm = 1.0 / std::sqrt(static_cast<double>(n));
    const double dnorm = std::sqrt(2.0 / n);
    for (int j = 1; j <= n; ++j) {
        Vec2 r = cnorm * m.com_pos;
        Vec2 p = cnorm * m.com_mom;
        for (int ell = 1; ell <= (n - 1) / 2; ++ell) {
            const double a = ell * detail::theta(n, j);
            const double c = std::cos(a), s = std::sin(a);
            r += dnorm * (c * m.cos_pos[ell - 1] + s * m.sin_pos[ell - 1]);
            p += dnorm * (c * m.cos_mom[ell - 1] + s * m.sin_mom[ell - 1]);
        }
        if (n % 2 == 0) {
            const double sign = (j % 2 == 1) ? 1.0 : -1.0;
            r += cnorm * sign * m.nyq_pos;
            p += cnorm * sign * m.nyq_mom;
        }
        st.positions[j - 1] = r;
        st.momenta[j - 1] = p;
    }
    return st;
}

namespace detail {

/// Advance one scalar oscillator (A, B) = (u, p_u) by dt.
inline void advance(Vec2& A, Vec2& B, double lambda, double omega, double mass, double dt) {
    if (lambda > 0.0) {
        const double Om = omega * std::sqrt(lambda);
        const double c = std::cos(Om * dt), s = std::sin(Om * dt);
        const Vec2 a = A, b = B;
        A = c * a + (s / (mass * Om)) * b;
        B = -(mass * Om * s) * a + c * b;
    } else if (lambda < 0.0) {
        const double nu = omega * std::sqrt(-lambda);
        const double c = std::cosh(nu * dt), s = std::sinh(nu * dt);
        const Vec2 a = A, b = B;
        A = c * a + (s / (mass * nu)) * b;
        B = (mass * nu * s) * a + c * b;
    } else {
        A += (dt / mass) * B; // free drift
    }
}

} // namespace detail

/// Exact flow of the uncoupled sector oscillators over a time dt.
/// Oscillatory sectors rotate harmonically, neutral sectors drift linearly,
/// hyperbolic sectors follow cosh/sinh at rate omega*sqrt(-lambda).
inline ModeAmplitudes evolve_modes(ModeAmplitudes m, const Spectrum& spectrum,
                                   double mass, double dt) {
    const int n = m.n;
    detail::advance(m.com_pos, m.com_mom, 0.0, spectrum.omega, mass, dt);
    for (int ell = 1; ell <= (n - 1) / 2; ++ell) {
        const double lam = spectrum.sector(ell).lambda;
        detail::advance(m.cos_pos[ell - 1], m.cos_mom[ell - 1], lam, spectrum.omega, mass, dt);
        detail::advance(m.sin_pos[ell - 1], m.sin_mom[ell - 1], lam, spectrum.omega, mass, dt);
    }
    if (n % 2 == 0)
        detail::advance(m.nyq_pos, m.nyq_mom, spectrum.sector(n / 2).lambda, spectrum.omega, mass, dt);
    return m;
}

/// Exact solution of the linear equations of motion at time initial.t + t:
/// reconstruct(evolve(decompose(initial))).
inline PhaseState analytic_state(const SystemSpec& spec, const PhaseState& initial, double t) {
    validate_spec(spec);
    const Spectrum spectrum = stiffness_eigenvalues(spec);
    ModeAmplitudes m = fourier_decompose(initial, spec.n);
    m = evolve_modes(std::move(m), spectrum, spec.mass, t);
    return fourier_reconstruct(m, spec.n, initial.t + t);
}

/// Sector energy E_ell = |B|^2/(2m) + (m/2) Omega^2 |A|^2, summed over the
/// sector's cosine/sine components. ell = 0 gives the COM kinetic energy.
inline double sector_energy(const ModeAmplitudes& m, const Spectrum& spectrum,
                            double mass, int ell) {
    const double om2 = spectrum.omega * spectrum.omega;
    auto e = [&](const Vec2& A, const Vec2& B, double lam) {
        return norm2(B) / (2.0 * mass) + 0.5 * mass * om2 * lam * norm2(A);
    };
    if (ell == 0) return norm2(m.com_mom) / (2.0 * mass);
    if (m.has_nyquist() && ell == m.n / 2)
        return e(m.nyq_pos, m.nyq_mom, spectrum.sector(ell).lambda);
    const double lam = spectrum.sector(ell).lambda;
    return e(m.cos_pos[ell - 1], m.cos_mom[ell - 1], lam) +
           e(m.sin_pos[ell - 1], m.sin_mom[ell - 1], lam);
}

/// Total internal energy (all sectors ell >= 1).
inline double internal_energy(const ModeAmplitudes& m, const Spectrum& spectrum, double mass) {
    double tot = 0.0;
    for (int ell = 1; ell <= m.n / 2; ++ell) tot += sector_energy(m, spectrum, mass, ell);
    return tot;
}

/// Dynamically active sectors: ell >= 1 whose sector energy exceeds
/// rel_tol times the total internal energy. Empty set for zero internal energy.
inline std::set<int> active_sectors(const ModeAmplitudes& m, const Spectrum& spectrum,
                                    double mass, double rel_tol = 1e-8) {
    std::set<int> act;
    const double total = internal_energy(m, spectrum, mass);
    if (total == 0.0) return act;
    for (int ell = 1; ell <= m.n / 2; ++ell)
        if (sector_energy(m, spectrum, mass, ell) > rel_tol * total) act.insert(ell);
    return act;
}

// ---------------------------------------------------------------------------
// Closed-form trajectories for the two reference systems. These evaluate the
// explicit solutions directly from the initial data, independently of the
// mode pipeline, and serve as cross-checks against analytic_state.
// ---------------------------------------------------------------------------

/// n = 4 with couplings (1, -1/2) implied: frequencies (omega, 2 omega).
/// r1, r2 evolve on the diagonal pair combinations; r3(t) = r1(t + 2 tau) and
/// r4(t) = r2(t + 2 tau) with tau = pi/(2 omega). Valid for data whose centre
/// of mass rests at the origin.
inline PhaseState closed_form_n4(const PhaseState& initial, double omega, double mass, double t) {
    if (initial.n() != 4) throw WrongN("closed_form_n4 needs 4 particles");
    const auto& r = initial.positions;
    const auto& p = initial.momenta;

    auto pair_pos = [&](int a, int b, double tt) {
        const Vec2 rm = r[a] - r[b], rp = r[a] + r[b];
        const Vec2 pm = p[a] - p[b], pp = p[a] + p[b];
        return 0.5 * (std::cos(omega * tt) * rm + std::cos(2.0 * omega * tt) * rp) +
               (1.0 / (4.0 * mass * omega)) *
                   (2.0 * std::sin(omega * tt) * pm + std::sin(2.0 * omega * tt) * pp);
    };
    auto pair_mom = [&](int a, int b, double tt) {
        const Vec2 rm = r[a] - r[b], rp = r[a] + r[b];
        const Vec2 pm = p[a] - p[b], pp = p[a] + p[b];
        return 0.5 * mass *
                   (-omega * std::sin(omega * tt) * rm - 2.0 * omega * std::sin(2.0 * omega * tt) * rp) +
               0.25 * (2.0 * std::cos(omega * tt) * pm + 2.0 * std::cos(2.0 * omega * tt) * pp);
    };

    const double tau = std::numbers::pi / (2.0 * omega);
    PhaseState out;
    out.t = initial.t + t;
    out.positions = {pair_pos(0, 2, t), pair_pos(1, 3, t),
                     pair_pos(0, 2, t + 2.0 * tau), pair_pos(1, 3, t + 2.0 * tau)};
    out.momenta = {pair_mom(0, 2, t), pair_mom(1, 3, t),
                   pair_mom(0, 2, t + 2.0 * tau), pair_mom(1, 3, t + 2.0 * tau)};
    return out;
}

/// n = 5 with the superintegrable couplings of the pentagonal model implied:
/// frequencies (omega, 2 omega). Written with the two sector projectors
///   P1 x_i = (2/5)[x_i + c- (x_{i+1}+x_{i-1}) - c+ (x_{i+2}+x_{i-2})]
///   P2 x_i = (2/5)[x_i - c+ (x_{i+1}+x_{i-1}) + c- (x_{i+2}+x_{i-2})]
/// where c± = (sqrt5 ± 1)/4 = ∓cos(4pi/5), cos(2pi/5). Valid in the COM frame.
inline PhaseState closed_form_n5(const PhaseState& initial, double omega, double mass, double t) {
    if (initial.n() != 5) throw WrongN("closed_form_n5 needs 5 particles");
    const double cp = (std::sqrt(5.0) + 1.0) / 4.0;
    const double cm = (std::sqrt(5.0) - 1.0) / 4.0;
    const auto& r = initial.positions;
    const auto& p = initial.momenta;

    auto proj1 = [&](const std::vector<Vec2>& x, int i) {
        return 0.4 * (x[i] + cm * (x[(i + 1) % 5] + x[(i + 4) % 5]) -
                      cp * (x[(i + 2) % 5] + x[(i + 3) % 5]));
    };
    auto proj2 = [&](const std::vector<Vec2>& x, int i) {
        return 0.4 * (x[i] - cp * (x[(i + 1) % 5] + x[(i + 4) % 5]) +
                      cm * (x[(i + 2) % 5] + x[(i + 3) % 5]));
    };

    const double c1 = std::cos(omega * t), s1 = std::sin(omega * t);
    const double c2 = std::cos(2.0 * omega * t), s2 = std::sin(2.0 * omega * t);
    PhaseState out;
    out.t = initial.t + t;
    out.positions.resize(5);
    out.momenta.resize(5);
    for (int i = 0; i < 5; ++i) {
        const Vec2 r1 = proj1(r, i), r2 = proj2(r, i);
        const Vec2 p1 = proj1(p, i), p2 = proj2(p, i);
        out.positions[i] = c1 * r1 + c2 * r2 + (s1 / (mass * omega)) * p1 +
                           (s2 / (2.0 * mass * omega)) * p2;
        out.momenta[i] = -mass * omega * s1 * r1 - 2.0 * mass * omega * s2 * r2 +
                         c1 * p1 + c2 * p2;
    }
    return out;
}

/// Copy of `state` with the centre-of-mass position and total momentum removed.
inline PhaseState remove_com(const PhaseState& state) {
    const int n = state.n();
    Vec2 rc, pc;
    for (int i = 0; i < n; ++i) { rc += state.positions[i]; pc += state.momenta[i]; }
    rc = rc / n;
    pc = pc / n;
    PhaseState out = state;
    for (int i = 0; i < n; ++i) { out.positions[i] -= rc; out.momenta[i] -= pc; }
    return out;
}

} // namespace dnbody

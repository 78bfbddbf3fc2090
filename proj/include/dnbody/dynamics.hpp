#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dnbody/model.hpp"
#include "dnbody/modes.hpp"

namespace dnbody {

/// Sampled trajectory. states[k].t == times[k]; all states share one n.
struct Trajectory {
    std::vector<double> times;
    std::vector<PhaseState> states;
    SystemSpec spec;       ///< snapshot of the generating system
    std::string engine;    ///< "analytic" or "verlet"
    double dt = 0.0;       ///< integrator step (verlet) or sample spacing
    int stride = 1;

    int n() const { return states.empty() ? 0 : states.front().n(); }
    int samples() const { return static_cast<int>(states.size()); }
};

/// Gradient force of the quadratic dihedral potential, accumulated bond-wise
/// so Newton's third law holds contribution by contribution.
inline std::vector<Vec2> force(const SystemSpec& spec, const std::vector<Vec2>& positions) {
    const SystemSpec canon = convert_convention(spec, Convention::ListedOnce);
    const int n = canon.n;
    const double pref = canon.mass * canon.omega * canon.omega;
    std::vector<Vec2> f(n);
    for (int k = 1; k <= n / 2; ++k) {
        const double kap = canon.kappa(k);
        if (kap == 0.0) continue;
        const int bonds = (2 * k == n) ? n / 2 : n; // opposite pairs listed once
        for (int i = 0; i < bonds; ++i) {
            const int j = (i + k) % n;
            const Vec2 pull = (pref * kap) * (positions[i] - positions[j]);
            f[i] -= pull;
            f[j] += pull;
        }
    }
    return f;
}

/// Energy, total momentum and total angular momentum (z-component).
struct Conserved {
    double energy = 0.0;
    Vec2 momentum;
    double angular_momentum = 0.0;
};

inline Conserved conserved_quantities(const SystemSpec& spec, const PhaseState& state) {
    const SystemSpec canon = convert_convention(spec, Convention::ListedOnce);
    const int n = canon.n;
    Conserved c;
    for (int i = 0; i < n; ++i) {
        c.energy += norm2(state.momenta[i]) / (2.0 * canon.mass);
        c.momentum += state.momenta[i];
        c.angular_momentum += cross(state.positions[i], state.momenta[i]);
    }
    const double pref = 0.5 * canon.mass * canon.omega * canon.omega;
    for (int k = 1; k <= n / 2; ++k) {
        const double kap = canon.kappa(k);
        const int bonds = (2 * k == n) ? n / 2 : n;
        for (int i = 0; i < bonds; ++i)
            c.energy += pref * kap * norm2(state.positions[i] - state.positions[(i + k) % n]);
    }
    return c;
}

/// Velocity-Verlet integration, sampled every `stride` steps (state 0
/// included). Deterministic. Throws NonFinite on NaN/Inf and Diverged when
/// any position exceeds 1e12 times the initial scale (hyperbolic runaway).
inline Trajectory integrate_verlet(const SystemSpec& spec, const PhaseState& initial,
                                   double dt, long steps, long stride = 1) {
    validate_spec(spec);
    if (!(dt > 0.0)) throw NonPositiveParameter("dt must be positive");
    if (steps < 1) throw NonPositiveParameter("steps must be >= 1");
    if (stride < 1) throw NonPositiveParameter("stride must be >= 1");
    const int n = spec.n;
    if (initial.n() != n) throw BadDimension("initial state does not match spec");

    double scale = 1.0;
    for (const Vec2& r : initial.positions) scale = std::max(scale, norm(r));
    const double cap = 1e12 * scale;

    Trajectory traj;
    traj.spec = spec;
    traj.engine = "verlet";
    traj.dt = dt;
    traj.stride = static_cast<int>(stride);

    std::vector<Vec2> r = initial.positions;
    std::vector<Vec2> v(n);
    for (int i = 0; i < n; ++i) v[i] = initial.momenta[i] / spec.mass;
    // compensated accumulation: without it the momentum error random-walks
    // with the step count and breaks 1e-12 conservation over 1e6 steps
    std::vector<Vec2> cr(n), cv(n);
    auto add = [](Vec2& sum, Vec2& comp, const Vec2& term) {
        const Vec2 y = term - comp;
        const Vec2 t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };

    auto record = [&](long step) {
        PhaseState st;
        st.t = initial.t + step * dt;
        st.positions = r;
        st.momenta.resize(n);
        for (int i = 0; i < n; ++i) {
            st.momenta[i] = spec.mass * v[i];
            if (!finite(st.positions[i]) || !finite(st.momenta[i]))
                throw NonFinite("non-finite state at t=" + std::to_string(st.t));
            if (norm(st.positions[i]) > cap)
                throw Diverged("position exceeded 1e12 x initial scale at t=" + std::to_string(st.t));
        }
        traj.times.push_back(st.t);
        traj.states.push_back(std::move(st));
    };

    record(0);
    std::vector<Vec2> f = force(spec, r);
    const double half = 0.5 * dt / spec.mass;
    for (long step = 1; step <= steps; ++step) {
        for (int i = 0; i < n; ++i) {
            add(v[i], cv[i], half * f[i]);
            add(r[i], cr[i], dt * v[i]);
        }
        f = force(spec, r);
        for (int i = 0; i < n; ++i) add(v[i], cv[i], half * f[i]);
        if (step % stride == 0 || step == steps) record(step);
    }
    return traj;
}

} // namespace dnbody

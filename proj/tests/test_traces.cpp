#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dnbody/resonance.hpp"
#include "dnbody/scenario.hpp"
#include "dnbody/traces.hpp"

using namespace dnbody;

namespace {

const std::string kScenarioDir = SCENARIO_DIR;

Scenario figure(const std::string& name) { return load_scenario(kScenarioDir + "/" + name); }

// hand-built trajectory: particles on given circles with phase offsets
Trajectory circle_traj(const std::vector<double>& radii, const std::vector<double>& phases,
                       int samples, double T = 2.0 * std::numbers::pi) {
    Trajectory traj;
    const int n = static_cast<int>(radii.size());
    for (int k = 0; k < samples; ++k) {
        PhaseState st;
        st.t = T * k / samples;
        for (int i = 0; i < n; ++i) {
            const double a = 2.0 * std::numbers::pi * k / samples + phases[i];
            st.positions.push_back({radii[i] * std::cos(a), radii[i] * std::sin(a)});
            st.momenta.push_back({});
        }
        traj.times.push_back(st.t);
        traj.states.push_back(std::move(st));
    }
    return traj;
}

} // namespace

TEST_CASE("sample_period produces closed centred curves", "[traces]") {
    auto sc = figure("six_body_choreography.scn");
    const double T = 2.0 * std::numbers::pi / std::sqrt(3.0);
    auto traj = sample_period(sc.spec, sc.initial, T, 1024);
    REQUIRE(traj.samples() == 1024);

    SECTION("centre of mass is removed at every sample") {
        for (const auto& st : traj.states) {
            Vec2 com;
            for (const Vec2& r : st.positions) com += r;
            REQUIRE(norm(com) < 1e-10);
        }
    }
    SECTION("state at T equals state at 0") {
        auto closed = analytic_state(sc.spec, traj.states.front(), T);
        double worst = 0.0;
        for (int i = 0; i < 6; ++i)
            worst = std::max(worst, dist(closed.positions[i], traj.states.front().positions[i]));
        CHECK(worst < 1e-9);
    }
    SECTION("first/last gap is consistent with the grid spacing") {
        double speed = 0.0;
        for (int i = 0; i < 6; ++i)
            speed = std::max(speed, norm(traj.states.front().momenta[i]) / sc.spec.mass);
        for (int i = 0; i < 6; ++i) {
            const double gap = dist(traj.states.back().positions[i], traj.states.front().positions[i]);
            REQUIRE(gap <= 2.0 * speed * (T / 1024) + 1e-9);
        }
    }
    SECTION("zero internal motion raises the degenerate-diameter error") {
        PhaseState rest;
        rest.positions.assign(6, Vec2{0.4, -0.2}); // pure COM offset
        rest.momenta.assign(6, {});
        auto flat = sample_period(sc.spec, rest, T, 16);
        CHECK_THROWS_AS(partition(flat, T, 6, 1e-6), DegenerateDiameter);
    }
}

TEST_CASE("timeshift residual basics", "[traces]") {
    auto traj = circle_traj({1.0, 1.0}, {0.0, std::numbers::pi}, 360);

    SECTION("identity pair at zero shift") {
        CHECK(timeshift_residual(traj, 1, 1, 0) == 0.0);
    }
    SECTION("half-period shift maps the antipodal partner") {
        CHECK(timeshift_residual(traj, 1, 2, 180) < 1e-12);
        CHECK(timeshift_residual(traj, 1, 2, 0) == Catch::Approx(2.0));
    }
    SECTION("index validation") {
        CHECK_THROWS_AS(timeshift_residual(traj, 0, 1, 0), BadIndex);
        CHECK_THROWS_AS(timeshift_residual(traj, 1, 3, 0), BadIndex);
        CHECK_THROWS_AS(timeshift_residual(traj, 1, 2, 360), BadIndex);
    }
    SECTION("choreography scenario: consecutive particles sit T/n apart") {
        auto sc = figure("six_body_choreography.scn");
        const double T = 2.0 * std::numbers::pi / std::sqrt(3.0);
        auto real = sample_period(sc.spec, sc.initial, T, 2520);
        double diam = 0.0;
        for (const auto& st : real.states)
            for (const Vec2& r : st.positions) diam = std::max(diam, norm(r));
        diam *= 2.0;
        CHECK(timeshift_residual(real, 1, 2, 2520 / 6) <= 1e-3 * diam);
    }
    SECTION("cross-dimer pairs stay far at every candidate shift") {
        auto sc = figure("four_body_two_dimers.scn");
        auto c = classify(sc.spec, sc.initial, Tolerances{.eps_rel = *sc.eps_rel});
        REQUIRE(c.period.has_value());
        auto real = sample_period(sc.spec, sc.initial, *c.period, 2520);
        double diam = 0.0;
        for (const auto& st : real.states)
            for (const Vec2& r : st.positions) diam = std::max(diam, norm(r));
        diam *= 2.0;
        double best = 1e300;
        for (int sh = 0; sh < 2520; ++sh)
            best = std::min(best, timeshift_residual(real, 1, 2, sh));
        CHECK(best >= 0.1 * diam);
    }
}

TEST_CASE("partition recovers the figure-scenario block structure", "[traces]") {
    auto run = [&](const std::string& name) {
        auto sc = figure(name);
        auto c = classify(sc.spec, sc.initial, Tolerances{.eps_rel = *sc.eps_rel});
        REQUIRE(c.period.has_value());
        auto traj = sample_period(sc.spec, sc.initial, *c.period, default_samples(sc.spec.n));
        return partition(traj, *c.period, sc.spec.n, *sc.eps_rel);
    };

    SECTION("six-body 2+2+2: three dimers with internal shift T/2") {
        auto rep = run("six_body_three_dimers.scn");
        REQUIRE(rep.blocks.size() == 3);
        CHECK(rep.blocks[0].members == std::vector<int>{1, 4});
        CHECK(rep.blocks[1].members == std::vector<int>{2, 5});
        CHECK(rep.blocks[2].members == std::vector<int>{3, 6});
        for (const auto& b : rep.blocks) {
            CHECK(b.shift_consistent);
            CHECK(b.shift_index[1] == 2520 / 2);
        }
        CHECK_FALSE(rep.single_trace);
        // distinct curves: every inter-block distance clears the phase-split band
        for (size_t a = 0; a < 3; ++a)
            for (size_t b = a + 1; b < 3; ++b)
                CHECK(rep.curve_distance[a][b] > 10.0 * rep.eps_abs);
        CHECK(rep.phase_split_pairs.empty());
    }
    SECTION("six-body choreography: one block, shifts T/6") {
        auto rep = run("six_body_choreography.scn");
        REQUIRE(rep.blocks.size() == 1);
        CHECK(rep.blocks[0].members == std::vector<int>{1, 2, 3, 4, 5, 6});
        CHECK(rep.single_trace);
        CHECK(rep.global_shift_consistent);
        std::vector<int> shifts = rep.blocks[0].shift_index;
        std::sort(shifts.begin(), shifts.end());
        CHECK(shifts == std::vector<int>{0, 420, 840, 1260, 1680, 2100});
    }
    SECTION("five-body 2+2+1: two dimers and a singleton") {
        auto rep = run("five_body_two_dimers_singleton.scn");
        REQUIRE(rep.blocks.size() == 3);
        std::vector<size_t> sizes;
        for (const auto& b : rep.blocks) sizes.push_back(b.members.size());
        std::sort(sizes.begin(), sizes.end());
        CHECK(sizes == std::vector<size_t>{1, 2, 2});
        // dimer internal shift is T/2 even though 2 does not divide 5
        for (const auto& b : rep.blocks)
            if (b.members.size() == 2) CHECK(b.shift_index[1] == 2520 / 2);
    }
    SECTION("four-body limacon: one block, shifts T/4") {
        auto rep = run("four_body_limacon.scn");
        REQUIRE(rep.blocks.size() == 1);
        CHECK(rep.single_trace);
        std::vector<int> shifts = rep.blocks[0].shift_index;
        std::sort(shifts.begin(), shifts.end());
        CHECK(shifts == std::vector<int>{0, 630, 1260, 1890});
    }
}

TEST_CASE("curve distance on synthetic traces", "[traces]") {
    SECTION("block against itself is zero") {
        auto traj = circle_traj({1.0, 1.0}, {0.0, 1.1}, 256);
        TraceBlock b;
        b.members = {1};
        CHECK(curve_distance(traj, b, b) == 0.0);
    }
    SECTION("same circle, phase-split: distance zero, separate blocks") {
        // offset of 17 grid steps: sampled point sets coincide exactly, but
        // 17/720 is not a candidate time shift for two particles (only S/2 is)
        auto traj = circle_traj({1.0, 1.0}, {0.0, 17.0 * 2.0 * std::numbers::pi / 720.0}, 720);
        auto rep = partition(traj, 2.0 * std::numbers::pi, 2, 1e-6);
        REQUIRE(rep.blocks.size() == 2);
        CHECK(rep.curve_distance[0][1] < 1e-12);
        REQUIRE(rep.phase_split_pairs.size() == 1);
        CHECK(rep.phase_split_pairs[0] == std::pair<int, int>{0, 1});
    }
    SECTION("concentric circles are genuinely distinct") {
        auto traj = circle_traj({1.0, 2.0}, {0.0, 0.0}, 256);
        auto rep = partition(traj, 2.0 * std::numbers::pi, 2, 1e-6);
        REQUIRE(rep.blocks.size() == 2);
        CHECK(rep.curve_distance[0][1] == Catch::Approx(1.0).margin(1e-3));
    }
}

TEST_CASE("partition is invariant under rotation, scaling and relabeling", "[traces]") {
    auto sc = figure("six_body_three_dimers.scn");
    auto c = classify(sc.spec, sc.initial, Tolerances{.eps_rel = *sc.eps_rel});
    REQUIRE(c.period.has_value());
    const double T = *c.period;
    const int S = 2520;

    auto blocks_of = [&](const PhaseState& st) {
        auto traj = sample_period(sc.spec, st, T, S);
        auto rep = partition(traj, T, 6, *sc.eps_rel);
        std::vector<std::vector<int>> bs;
        for (const auto& b : rep.blocks) bs.push_back(b.members);
        return bs;
    };
    const auto base = blocks_of(sc.initial);
    REQUIRE(base.size() == 3);

    SECTION("global rotation") {
        PhaseState rot = sc.initial;
        for (int i = 0; i < 6; ++i) {
            rot.positions[i] = rotate(sc.initial.positions[i], 1.234);
            rot.momenta[i] = rotate(sc.initial.momenta[i], 1.234);
        }
        CHECK(blocks_of(rot) == base);
    }
    SECTION("global scaling") {
        PhaseState scl = sc.initial;
        for (int i = 0; i < 6; ++i) {
            scl.positions[i] *= 7.5;
            scl.momenta[i] *= 7.5;
        }
        CHECK(blocks_of(scl) == base);
    }
    SECTION("cyclic relabeling maps blocks accordingly") {
        PhaseState shifted;
        shifted.positions.resize(6);
        shifted.momenta.resize(6);
        for (int i = 0; i < 6; ++i) {
            shifted.positions[i] = sc.initial.positions[(i + 1) % 6];
            shifted.momenta[i] = sc.initial.momenta[(i + 1) % 6];
        }
        auto bs = blocks_of(shifted);
        REQUIRE(bs.size() == 3);
        // dimer pattern {i, i+3} is invariant under relabeling
        CHECK(bs[0] == std::vector<int>{1, 4});
        CHECK(bs[1] == std::vector<int>{2, 5});
        CHECK(bs[2] == std::vector<int>{3, 6});
    }
}

TEST_CASE("residuals are stable under grid refinement", "[traces]") {
    auto sc = figure("six_body_choreography.scn");
    const double T = 2.0 * std::numbers::pi / std::sqrt(3.0);
    auto coarse = sample_period(sc.spec, sc.initial, T, 2520);
    auto fine = sample_period(sc.spec, sc.initial, T, 5040);
    double speed = 0.0;
    for (const auto& st : coarse.states)
        for (const Vec2& p : st.momenta) speed = std::max(speed, norm(p) / sc.spec.mass);
    const double bound = speed * (T / 2520);
    const double rc = timeshift_residual(coarse, 1, 2, 2520 / 6);
    const double rf = timeshift_residual(fine, 1, 2, 5040 / 6);
    CHECK(std::abs(rc - rf) <= bound);
}

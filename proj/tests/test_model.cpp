#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dnbody/model.hpp"

using namespace dnbody;

namespace {

Rational rat(long long p, long long q = 1) { return Rational(p, q); }

// closed-form eigenvalues used as regression oracles, written out
// independently of the library's summation formula
Rational lam6_closed(int ell, const Rational& k1, const Rational& k2, const Rational& k3) {
    if (ell == 1) return k1 + 3 * k2 + 2 * k3;
    if (ell == 2) return 3 * k1 + 3 * k2;
    return 4 * k1 + 2 * k3;
}

std::pair<double, double> lam5_closed(double k1, double k2) {
    const double s = 5.0 * (k1 + k2);
    const double d = std::sqrt(5.0) * (k1 - k2);
    return {0.5 * (s - d), 0.5 * (s + d)}; // (lambda-, lambda+)
}

} // namespace

TEST_CASE("validate_spec accepts and rejects per the invariants", "[model]") {
    auto ok = make_spec(6, 1.0, 1.0, {rat(2), rat(-2, 3), rat(1, 2)});
    REQUIRE_NOTHROW(validate_spec(ok));

    auto short_couplings = make_spec(4, 1.0, 1.0, {rat(1)});
    REQUIRE_THROWS_AS(validate_spec(short_couplings), BadDimension);

    auto too_small = make_spec(2, 1.0, 1.0, {rat(1)});
    REQUIRE_THROWS_AS(validate_spec(too_small), NTooSmall);

    auto bad_mass = make_spec(4, -1.0, 1.0, {rat(1), rat(1)});
    REQUIRE_THROWS_AS(validate_spec(bad_mass), NonPositiveParameter);
    auto bad_omega = make_spec(4, 1.0, 0.0, {rat(1), rat(1)});
    REQUIRE_THROWS_AS(validate_spec(bad_omega), NonPositiveParameter);
}

TEST_CASE("convert_convention rescales only the opposite-vertex coupling", "[model]") {
    auto ds = make_spec(4, 1.0, 1.0, {rat(1), rat(-1, 4)}, Convention::DoubleSum);
    auto lo = convert_convention(ds, Convention::ListedOnce);
    CHECK(lo.couplings[0] == rat(1));
    CHECK(lo.couplings[1] == rat(-1, 2));

    auto back = convert_convention(lo, Convention::DoubleSum);
    CHECK(back.couplings == ds.couplings);

    // odd n: unchanged either way
    auto odd = make_spec(5, 1.0, 1.0, {rat(3), rat(-1)}, Convention::DoubleSum);
    auto odd_lo = convert_convention(odd, Convention::ListedOnce);
    CHECK(odd_lo.couplings == odd.couplings);

    // the spectrum is convention-invariant
    auto s1 = stiffness_eigenvalues(ds);
    auto s2 = stiffness_eigenvalues(lo);
    for (int ell = 0; ell <= 2; ++ell) {
        CHECK(*s1.sector(ell).lambda_exact == *s2.sector(ell).lambda_exact);
        CHECK(s1.sector(ell).frequency == Catch::Approx(s2.sector(ell).frequency));
    }
}

TEST_CASE("stiffness eigenvalues reproduce the reference spectra", "[model]") {
    SECTION("n=6 fully resonant 1:2:3") {
        auto spec = make_spec(6, 1.0, 1.0, {rat(2), rat(-2, 3), rat(1, 2)});
        auto sp = stiffness_eigenvalues(spec);
        REQUIRE(sp.exact);
        CHECK(*sp.sector(0).lambda_exact == rat(0));
        CHECK(*sp.sector(1).lambda_exact == rat(1));
        CHECK(*sp.sector(2).lambda_exact == rat(4));
        CHECK(*sp.sector(3).lambda_exact == rat(9));
    }
    SECTION("n=6 degenerate 1:2:2 locking") {
        auto spec = make_spec(6, 1.0, 1.0, {rat(7, 2), rat(1, 2), rat(-1)});
        auto sp = stiffness_eigenvalues(spec);
        CHECK(*sp.sector(1).lambda_exact == rat(3));
        CHECK(*sp.sector(2).lambda_exact == rat(12));
        CHECK(*sp.sector(3).lambda_exact == rat(12));
        REQUIRE(sp.degeneracy_groups.size() == 2);
        CHECK(sp.degeneracy_groups[0] == std::vector<int>{1});
        CHECK(sp.degeneracy_groups[1] == std::vector<int>{2, 3});
    }
    SECTION("n=4 limacon couplings give Omega = (omega, 2 omega)") {
        auto spec = make_spec(4, 1.0, 1.0, {rat(1), rat(-1, 2)});
        auto sp = stiffness_eigenvalues(spec);
        CHECK(*sp.sector(1).lambda_exact == rat(1));
        CHECK(*sp.sector(2).lambda_exact == rat(4));
        CHECK(sp.sector(1).frequency == Catch::Approx(1.0));
        CHECK(sp.sector(2).frequency == Catch::Approx(2.0));
        CHECK(sp.sector(1).multiplicity == 2);
        CHECK(sp.sector(2).multiplicity == 1);
    }
    SECTION("n=5 superintegrable pair gives lambda = (1, 4)") {
        const double k1 = 0.5 * (3.0 / std::sqrt(5.0) + 1.0);
        const double k2 = -0.5 * (3.0 / std::sqrt(5.0) - 1.0);
        auto spec = make_spec(5, 1.0, 1.0, std::vector<double>{k1, k2});
        auto sp = stiffness_eigenvalues(spec);
        CHECK_FALSE(sp.exact);
        CHECK(sp.sector(1).lambda == Catch::Approx(1.0).margin(1e-12));
        CHECK(sp.sector(2).lambda == Catch::Approx(4.0).margin(1e-12));
    }
    SECTION("zero couplings: all neutral") {
        auto spec = make_spec(7, 2.0, 3.0, {rat(0), rat(0), rat(0)});
        auto sp = stiffness_eigenvalues(spec);
        for (int ell = 0; ell <= 3; ++ell) {
            CHECK(sp.sector(ell).lambda == 0.0);
            CHECK(sp.sector(ell).branch == Branch::Neutral);
        }
    }
    SECTION("multiplicities sum to n") {
        for (int n : {3, 4, 5, 6, 7, 8, 11, 12}) {
            std::vector<Rational> ks(n / 2, rat(1));
            auto sp = stiffness_eigenvalues(make_spec(n, 1.0, 1.0, ks));
            int total = 0;
            for (const auto& s : sp.sectors) total += s.multiplicity;
            CHECK(total == n);
        }
    }
    SECTION("negative lambda reported as hyperbolic, zero mode untouched") {
        auto spec = make_spec(4, 1.0, 2.0, {rat(1), rat(-2)});
        auto sp = stiffness_eigenvalues(spec); // lambda_1 = 2(1-2) = -2
        CHECK(sp.sector(1).branch == Branch::Hyperbolic);
        CHECK(sp.sector(1).rate == Catch::Approx(2.0 * std::sqrt(2.0)));
        CHECK(sp.sector(0).lambda == 0.0);
    }
}

TEST_CASE("n=6 eigenvalues match the closed forms exactly on random rationals", "[model]") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<long long> num(-40, 40), den(1, 12);
    for (int trial = 0; trial < 100; ++trial) {
        Rational k1 = rat(num(rng), den(rng));
        Rational k2 = rat(num(rng), den(rng));
        Rational k3 = rat(num(rng), den(rng));
        auto sp = stiffness_eigenvalues(make_spec(6, 1.0, 1.0, {k1, k2, k3}));
        for (int ell = 1; ell <= 3; ++ell)
            REQUIRE(*sp.sector(ell).lambda_exact == lam6_closed(ell, k1, k2, k3));
    }
}

TEST_CASE("n=5 eigenvalues match lambda± to 1e-12 relative on random pairs", "[model]") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> coup(-5.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double k1 = coup(rng), k2 = coup(rng);
        auto sp = stiffness_eigenvalues(make_spec(5, 1.0, 1.0, std::vector<double>{k1, k2}));
        auto [lm, lp] = lam5_closed(k1, k2);
        const double scale = std::max({std::abs(lm), std::abs(lp), 1e-30});
        CHECK(std::abs(sp.sector(1).lambda - lm) <= 1e-12 * scale);
        CHECK(std::abs(sp.sector(2).lambda - lp) <= 1e-12 * scale);
    }
}

TEST_CASE("eigenvalues are linear in the couplings (exact)", "[model]") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<long long> num(-20, 20), den(1, 9);
    for (int trial = 0; trial < 50; ++trial) {
        Rational a = rat(num(rng), den(rng)), b = rat(num(rng), den(rng));
        std::vector<Rational> ka, kb, kc;
        for (int k = 0; k < 3; ++k) {
            ka.push_back(rat(num(rng), den(rng)));
            kb.push_back(rat(num(rng), den(rng)));
            kc.push_back(a * ka.back() + b * kb.back());
        }
        auto sa = stiffness_eigenvalues(make_spec(6, 1.0, 1.0, ka));
        auto sb = stiffness_eigenvalues(make_spec(6, 1.0, 1.0, kb));
        auto sc = stiffness_eigenvalues(make_spec(6, 1.0, 1.0, kc));
        for (int ell = 0; ell <= 3; ++ell)
            REQUIRE(*sc.sector(ell).lambda_exact ==
                    a * *sa.sector(ell).lambda_exact + b * *sb.sector(ell).lambda_exact);
    }
}

TEST_CASE("rational parsing round trips", "[model]") {
    CHECK(parse_rational("-2/3") == rat(-2, 3));
    CHECK(parse_rational("7/2") == rat(7, 2));
    CHECK(parse_rational("-0.25") == rat(-1, 4));
    CHECK(parse_rational("1e-3") == rat(1, 1000));
    CHECK(parse_rational("2.5e2") == rat(250));
    CHECK(parse_rational(" 42 ") == rat(42));
    CHECK(format_rational(rat(-2, 3)) == "-2/3");
    CHECK(format_rational(rat(5)) == "5");
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
}

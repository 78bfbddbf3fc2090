#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "dnbody/scenario.hpp"

using namespace dnbody;

namespace {

const std::string kScenarioDir = SCENARIO_DIR;

Scenario parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

} // namespace

TEST_CASE("scenario files parse with exact couplings", "[scenario]") {
    auto sc = parse_text(
        "# demo\n"
        "label = demo system\n"
        "n = 4\n"
        "mass = 2\n"
        "omega = 0.5\n"
        "convention = double-sum\n"
        "couplings = 1, -1/4\n"
        "pos 1 = 1, 0\n"
        "pos 2 = 0, 1\n"
        "pos 3 = -1, 0\n"
        "pos 4 = 0, -1\n"
        "mom 2 = 1e-1, 2/5\n");
    CHECK(sc.label == "demo system");
    CHECK(sc.spec.n == 4);
    CHECK(sc.spec.mass == 2.0);
    CHECK(sc.spec.omega == 0.5);
    CHECK(sc.spec.convention == Convention::DoubleSum);
    CHECK(sc.spec.couplings[1] == Rational(-1, 4));
    CHECK(sc.initial.momenta[1].x == Catch::Approx(0.1));
    CHECK(sc.initial.momenta[1].y == Catch::Approx(0.4));
    CHECK(sc.initial.momenta[0].x == 0.0); // defaulted
}

TEST_CASE("scenario round trip is lossless", "[scenario]") {
    for (const std::string name :
         {"four_body_limacon.scn", "five_body_two_dimers_singleton.scn", "six_body_choreography.scn"}) {
        auto a = load_scenario(kScenarioDir + "/" + name);
        std::ostringstream out;
        serialize_scenario(a, out);
        auto b = parse_text(out.str());
        CHECK(a.label == b.label);
        CHECK(a.spec.n == b.spec.n);
        CHECK(a.spec.mass == b.spec.mass);
        CHECK(a.spec.omega == b.spec.omega);
        CHECK(a.spec.convention == b.spec.convention);
        CHECK(a.spec.couplings == b.spec.couplings);
        CHECK(a.eps_rel == b.eps_rel);
        for (int i = 0; i < a.spec.n; ++i) {
            CHECK(a.initial.positions[i].x == b.initial.positions[i].x);
            CHECK(a.initial.positions[i].y == b.initial.positions[i].y);
            CHECK(a.initial.momenta[i].x == b.initial.momenta[i].x);
            CHECK(a.initial.momenta[i].y == b.initial.momenta[i].y);
        }
        // second round trip reproduces the bytes
        std::ostringstream out2;
        serialize_scenario(b, out2);
        CHECK(out.str() == out2.str());
    }
}

TEST_CASE("scenario parse errors carry line and column", "[scenario]") {
    SECTION("missing '='") {
        try {
            parse_text("n = 4\njunk line\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 2);
        }
    }
    SECTION("malformed number") {
        try {
            parse_text("n = 4\nmass = heavy\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 2);
            CHECK(e.column == 8); // first character of the offending value
        }
    }
    SECTION("unknown key") {
        CHECK_THROWS_AS(parse_text("n = 3\nvelocity 1 = 0, 0\n"), ParseError);
    }
    SECTION("particle index out of range") {
        CHECK_THROWS_AS(parse_text("n = 3\ncouplings = 1\npos 4 = 0, 0\n"), ParseError);
    }
    SECTION("missing position") {
        CHECK_THROWS_AS(parse_text("n = 3\ncouplings = 1\npos 1 = 0, 0\npos 2 = 1, 1\n"), ParseError);
    }
    SECTION("validation failures surface as library errors") {
        CHECK_THROWS_AS(
            parse_text("n = 4\ncouplings = 1\npos 1 = 0,0\npos 2 = 1,0\npos 3 = 0,1\npos 4 = 1,1\n"),
            BadDimension);
        CHECK_THROWS_AS(parse_text("n = 2\ncouplings = 1\npos 1 = 0,0\npos 2 = 1,0\n"), NTooSmall);
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rdlab/models.hpp"

using namespace rdlab;

TEST_CASE("lotka-volterra hand values") {
    auto lv = lotka_volterra(LVParams::constant({1, 1, 1}, 1.0, {1, 1, 1}));
    auto f0 = eval_reaction(lv, 0.0, std::vector<double>{0, 0, 0});
    for (double v : f0) REQUIRE(v == 0.0);

    auto f1 = eval_reaction(lv, 0.0, std::vector<double>{1, 1, 1});
    for (double v : f1) REQUIRE(v == Catch::Approx(2.0));  // -1*(1-1-1-1)

    for (double p : estimate_growth_exponents(lv)) REQUIRE(p == Catch::Approx(3.0).margin(0.1));
    REQUIRE(lv.positive_cone_only);
}

TEST_CASE("time-dependent lotka-volterra coefficients") {
    LVParams p;
    p.autonomous = false;
    p.a[0] = [](double t) { return 1.0 + 0.5 * t; };
    auto lv = lotka_volterra(p);
    auto f = eval_reaction(lv, 2.0, std::vector<double>{1.0, 0.0, 0.0});
    REQUIRE(f[0] == Catch::Approx(-(2.0 - 1.0)));  // -u(a(2) - u) = -(2-1)
}

TEST_CASE("uncoupled logistic properties") {
    auto lg = uncoupled_logistic({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    auto f = eval_reaction(lg, 0.0, std::vector<double>{1, 1, 1});
    for (double v : f) REQUIRE(v == Catch::Approx(0.0).margin(1e-15));

    REQUIRE(check_cooperative(lg, 100.0, 0.0, make_plan(lg)).verdict == Verdict::Pass);

    auto c3 = check_one_sided_lipschitz(lg, make_plan(lg)).constants.at("fitted_C3");
    REQUIRE(c3 == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("uncoupled linear properties") {
    auto lin = uncoupled_linear({2.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    auto f = eval_reaction(lin, 0.0, std::vector<double>{1, 0, 0});
    REQUIRE(f[0] == Catch::Approx(-2.0));
    REQUIRE(f[1] == 0.0);
    REQUIRE(f[2] == 0.0);

    REQUIRE(lin.sublinear);
    auto rep = check_dissipation(lin, make_plan(lin));
    REQUIRE(rep.verdict == Verdict::Pass);
    REQUIRE(rep.constants.at("fitted_alpha") <= 0.0);
}

TEST_CASE("autocatalysis hand values") {
    auto ac = autocatalysis(0.7, 0.5, 0.25, 1.0);
    REQUIRE(eval_reaction(ac, 0.0, std::vector<double>{1.0})[0] == Catch::Approx(0.7));
    REQUIRE(eval_reaction(ac, 0.0, std::vector<double>{0.0})[0] == 0.0);
    // negative input clamps through max(u,0)^m instead of NaN
    REQUIRE(eval_reaction(ac, 0.0, std::vector<double>{-1e-12})[0] == 0.0);
    REQUIRE(ac.exponents[0] == Catch::Approx(2.5));
    REQUIRE(check_cooperative(ac, 2.0, 0.0, make_plan(ac)).verdict == Verdict::Pass);
    REQUIRE_THROWS_AS(autocatalysis(-1.0, 0.5, 0.5, 1.0), Error);
    REQUIRE_THROWS_AS(autocatalysis(1.0, 1.5, 0.5, 1.0), Error);
}

TEST_CASE("generalized logistic hand values") {
    auto gl = generalized_logistic(2.0, 1.0, 1.0);
    REQUIRE(eval_reaction(gl, 0.0, std::vector<double>{1.0})[0] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(gl.exponents[0] == Catch::Approx(4.0));
    REQUIRE(estimate_growth_exponents(gl)[0] == Catch::Approx(4.0).margin(0.1));

    // q = r = 1 specializes to the classical logistic written as (u-1)u
    auto cl = generalized_logistic(1.0, 1.0, 1.0);
    REQUIRE(eval_reaction(cl, 0.0, std::vector<double>{0.5})[0] == Catch::Approx(-0.25));
    REQUIRE_THROWS_AS(generalized_logistic(0.3, 0.3, 1.0), Error);
}

TEST_CASE("declared structural constants certify on the zoo") {
    auto lv = lotka_volterra(LVParams::constant({1, 1, 1}, 1.0, {1, 1, 1}));
    auto lg = uncoupled_logistic({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    auto lin = uncoupled_linear({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    auto ac = autocatalysis(1.0, 0.5, 0.5, 1.0);
    auto gl = generalized_logistic(2.0, 1.0, 1.0);
    for (const auto& sys : {lv, lg, lin, ac, gl}) {
        INFO(sys.name);
        REQUIRE(check_growth(sys, make_plan(sys)).verdict == Verdict::Pass);
        REQUIRE(check_dissipation(sys, make_plan(sys)).verdict == Verdict::Pass);
        REQUIRE(check_positivity_compat(sys, make_plan(sys)).verdict == Verdict::Pass);
    }
}

TEST_CASE("domination of the comparison pairs") {
    auto lv = lotka_volterra(LVParams::constant({1, 1, 1}, 1.0, {1, 1, 1}));
    auto lg = uncoupled_logistic({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    auto lin = uncoupled_linear({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    REQUIRE(dominates(lv, lg, make_plan(lv)).verdict == Verdict::Pass);
    REQUIRE(dominates(lv, lin, make_plan(lv)).verdict == Verdict::Pass);

    // cooperativity failure of the full system has a reproducible witness
    auto rep = check_cooperative(lv, 2.0, 0.0, make_plan(lv));
    REQUIRE(rep.verdict == Verdict::Fail);
    REQUIRE(!rep.witness.u.empty());
}

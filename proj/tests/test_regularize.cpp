#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rdlab/models.hpp"
#include "rdlab/regularize.hpp"

using namespace rdlab;

namespace {

ReactionSystem scalar(std::string name, std::function<double(double)> f, double p,
                      double alpha = 1.0, double C1 = 1.0, double C2 = 0.0) {
    ReactionSystem sys;
    sys.d = 1;
    sys.name = std::move(name);
    sys.diffusion = {1.0};
    sys.exponents = {p};
    sys.sublinear = p == 2.0;
    sys.alpha = alpha;
    sys.C1 = C1;
    sys.C2 = C2;
    sys.eval = [f](double, std::span<const double> u, std::span<double> out) { out[0] = f(u[0]); };
    return sys;
}

ReactionSystem cubic() {
    return scalar("cubic", [](double u) { return u * u * u; }, 4.0);
}

}  // namespace

TEST_CASE("smooth cutoff profile") {
    auto prof = cutoff_plateau(3.0);
    REQUIRE(smooth_cutoff(prof, 2.0) == 1.0);
    REQUIRE(smooth_cutoff(prof, 3.0) == 1.0);
    REQUIRE(smooth_cutoff(prof, 5.0) == 0.0);
    REQUIRE(smooth_cutoff(prof, 4.0) == 0.0);
    const double mid = smooth_cutoff(prof, 3.5);
    REQUIRE(mid > 0.0);
    REQUIRE(mid < 1.0);
    REQUIRE(mid == Catch::Approx(0.5).epsilon(1e-12));
    // monotone non-increasing across the transition
    double prev = 1.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = smooth_cutoff(prof, 3.0 + i / 100.0);
        REQUIRE(v <= prev + 1e-15);
        prev = v;
    }
    REQUIRE_THROWS_AS(smooth_cutoff(prof, -1.0), Error);
}

TEST_CASE("truncation plateau is bit-identical") {
    auto f = scalar("cubic_minus_u", [](double u) { return u * u * u - u; }, 4.0);
    auto reg = truncate(f, 3.0, TailVariant::Plain);
    for (double u : {0.0, 0.5, 1.5, -2.9, 3.0}) {
        const double a = eval_reaction(f, 0.0, std::vector<double>{u})[0];
        const double b = eval_reaction(reg.system, 0.0, std::vector<double>{u})[0];
        REQUIRE(a == b);  // exact, no blending applied on the plateau
    }
    // beyond the cutoff the plain tail is the odd monomial |u|^{p-2} u
    for (double u : {4.0, 5.5, -4.2}) {
        const double b = eval_reaction(reg.system, 0.0, std::vector<double>{u})[0];
        REQUIRE(b == Catch::Approx(u * u * u).epsilon(1e-13));
    }
    REQUIRE_THROWS_AS(truncate(f, 2.0, TailVariant::Mixed, {5.0}), Error);
    REQUIRE_THROWS_AS(truncate(f, 2.0, TailVariant::Mixed, {1.5}), Error);
}

TEST_CASE("empty stage list reproduces the base system") {
    auto f = cubic();
    auto reg = RegularizedSystem::wrap(f);
    REQUIRE(reg.stages.empty());
    for (double u : {-2.0, 0.3, 7.0})
        REQUIRE(eval_reaction(reg.system, 0.0, std::vector<double>{u})[0] ==
                eval_reaction(f, 0.0, std::vector<double>{u})[0]);
}

TEST_CASE("truncated ordering of the competition pair") {
    auto lv = lotka_volterra(LVParams::constant({1, 1, 1}, 1.0, {1, 1, 1}));
    auto lg = uncoupled_logistic({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    auto t1 = truncate(lv, 2.0, TailVariant::Affine);
    auto t2 = truncate(lg, 2.0, TailVariant::Plain);
    Rng rng(31);
    for (int s = 0; s < 2000; ++s) {
        auto u = rng.in_ball(3, 5.0);
        for (double& x : u) x = std::abs(x);
        auto f1 = eval_reaction(t1.system, 0.0, u);
        auto f2 = eval_reaction(t2.system, 0.0, u);
        for (int i = 0; i < 3; ++i) REQUIRE(f1[i] >= f2[i] - 1e-10 * (1.0 + std::abs(f2[i])));
    }
}

TEST_CASE("mollifier bump") {
    for (int dim : {1, 2, 3}) {
        auto mol = make_mollifier(0.25, dim, 8);
        double total = 0.0;
        for (double w : mol.node_weights) total += w;
        REQUIRE(total == Catch::Approx(1.0).epsilon(1e-8));  // normalized by construction

        std::vector<double> zero(dim, 0.0);
        const double at0 = mol.density(zero);
        REQUIRE(at0 > 0.0);
        std::vector<double> near(dim, 0.0);
        near[0] = 0.999 * 0.25;
        REQUIRE(mol.density(near) > 0.0);
        REQUIRE(mol.density(near) < at0);
        near[0] = 1.001 * 0.25;
        REQUIRE(mol.density(near) == 0.0);
        for (const auto& s : mol.nodes) {
            double r = 0.0;
            for (int a = 0; a < dim; ++a) r += s[a] * s[a];
            REQUIRE(std::sqrt(r) < 0.25 * std::sqrt(3.0) + 1e-12);
        }
    }
    REQUIRE_THROWS_AS(make_mollifier(0.0, 1), Error);
    REQUIRE_THROWS_AS(make_mollifier(0.1, 4), Error);
    REQUIRE_THROWS_AS(make_mollifier(0.1, 1, 2), Error);
}

TEST_CASE("mollification reproduces linear maps") {
    ReactionSystem lin;
    lin.d = 2;
    lin.name = "lin2";
    lin.diffusion = {1.0, 1.0};
    lin.exponents = {2.0, 2.0};
    lin.sublinear = true;
    lin.alpha = -2.0;
    lin.eval = [](double, std::span<const double> u, std::span<double> out) {
        out[0] = 2.0 * u[0] - 0.5 * u[1] + 0.25;
        out[1] = u[0] + 3.0 * u[1];
    };
    auto mol = make_mollifier(0.3, 2, 8);
    auto smooth = mollify(lin, mol);
    Rng rng(5);
    for (int s = 0; s < 200; ++s) {
        auto u = rng.in_ball(2, 4.0);
        auto a = eval_reaction(lin, 0.0, u);
        auto b = eval_reaction(smooth.system, 0.0, u);
        REQUIRE(b[0] == Catch::Approx(a[0]).margin(1e-8));
        REQUIRE(b[1] == Catch::Approx(a[1]).margin(1e-8));
    }
}

TEST_CASE("mollified kink at the origin equals the explicit integral") {
    auto absf = scalar("abs", [](double u) { return std::abs(u); }, 2.0);
    auto mol = make_mollifier(0.1, 1, 12);
    auto smooth = mollify(absf, mol);
    const double got = eval_reaction(smooth.system, 0.0, std::vector<double>{0.0})[0];
    double expect = 0.0;  // sum w_q |s_q| over the stored rule
    for (std::size_t q = 0; q < mol.nodes.size(); ++q)
        expect += mol.node_weights[q] * std::abs(mol.nodes[q][0]);
    REQUIRE(got > 0.0);
    REQUIRE(got == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("mollified system has converging difference quotients") {
    auto sm = mollify(truncate(cubic(), 4.0, TailVariant::Plain), make_mollifier(0.5, 1, 16));
    const auto& mol = make_mollifier(0.5, 1, 16);
    // exact derivative of the convolved cubic from the stored rule
    auto dref = [&](double u) {
        double s = 0.0;
        for (std::size_t q = 0; q < mol.nodes.size(); ++q)
            s += mol.node_weights[q] * 3.0 * sq(u - mol.nodes[q][0]);
        return s;
    };
    for (double u : {0.2, 1.1}) {
        auto fd = [&](double h) {
            const double fp = eval_reaction(sm.system, 0.0, std::vector<double>{u + h})[0];
            const double fm = eval_reaction(sm.system, 0.0, std::vector<double>{u - h})[0];
            return (fp - fm) / (2.0 * h);
        };
        const double e1 = std::abs(fd(0.08) - dref(u));
        const double e2 = std::abs(fd(0.04) - dref(u));
        const double order = std::log2(e1 / e2);
        REQUIRE(order >= 1.9);
    }
}

TEST_CASE("epsilon selection on the halving schedule") {
    auto ident = scalar("ident", [](double u) { return u; }, 2.0);
    REQUIRE(select_epsilon(ident, 10.0) == Catch::Approx(1.0 / 16.0));

    auto constf = scalar("const", [](double) { return 0.7; }, 2.0);
    REQUIRE(select_epsilon(constf, 10.0) == Catch::Approx(0.5));

    auto square = scalar("square", [](double u) { return u * u; }, 3.0);
    REQUIRE(select_epsilon(square, 4.0) == Catch::Approx(1.0 / 64.0));
}

TEST_CASE("constant shift") {
    auto zero = scalar("zero", [](double) { return 0.0; }, 2.0);
    auto s0 = shift(zero, 0.0, 3);
    REQUIRE(eval_reaction(s0.system, 0.0, std::vector<double>{2.0})[0] == 0.0);
    auto s = shift(zero, 0.1, 3);
    REQUIRE(eval_reaction(s.system, 0.0, std::vector<double>{2.0})[0] == Catch::Approx(-0.3));

    auto base = cubic();
    auto sh = shift(base, 0.25, 2);
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        auto u = rng.in_ball(1, 8.0);
        const double gap = eval_reaction(base, 0.0, u)[0] - eval_reaction(sh.system, 0.0, u)[0];
        REQUIRE(gap == Catch::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("outer blend plateau and tail") {
    auto inner = scalar("inner", [](double) { return 1.0; }, 2.0);
    auto outer = scalar("outer", [](double) { return -1.0; }, 2.0);
    const double n = 2.0;
    auto l = outer_blend(RegularizedSystem::wrap(inner.eval ? inner : inner), outer, n, 0.5);
    REQUIRE(eval_reaction(l.system, 0.0, std::vector<double>{n})[0] == 1.0);
    REQUIRE(eval_reaction(l.system, 0.0, std::vector<double>{n + 3.0})[0] == -1.0);
    const double midv = eval_reaction(l.system, 0.0, std::vector<double>{n + 1.75})[0];
    REQUIRE(midv > -1.0);
    REQUIRE(midv < 1.0);

    // ordering preservation: ordered inner and outer pairs give ordered blends
    auto in1 = scalar("in1", [](double u) { return u * u + 1.0; }, 4.0);
    auto in2 = scalar("in2", [](double u) { return u * u; }, 4.0);
    auto out1 = scalar("out1", [](double u) { return 2.0 * std::abs(u); }, 4.0);
    auto out2 = scalar("out2", [](double u) { return std::abs(u); }, 4.0);
    auto l1 = outer_blend(RegularizedSystem::wrap(in1), out1, n, 0.5);
    auto l2 = outer_blend(RegularizedSystem::wrap(in2), out2, n, 0.5);
    Rng rng(3);
    for (int s = 0; s < 400; ++s) {
        const double u = std::abs(rng.uniform(-6.0, 6.0));
        const double a = eval_reaction(l1.system, 0.0, std::vector<double>{u})[0];
        const double b = eval_reaction(l2.system, 0.0, std::vector<double>{u})[0];
        REQUIRE(a >= b - 1e-12);
    }
}

TEST_CASE("sup deviation basics") {
    auto f = cubic();
    REQUIRE(sup_deviation(f, f, 3.0, 0.01) == 0.0);
    auto reg = truncate(f, 5.0, TailVariant::Plain);
    REQUIRE(sup_deviation(f, reg.system, 3.0, 0.01) == 0.0);  // plateau covers the ball
}

TEST_CASE("smoothing pipeline convergence table") {
    auto f = cubic();
    double prev_dev = std::numeric_limits<double>::infinity();
    for (double k : {4.0, 8.0}) {
        auto built = build_smoothed(f, k, TailVariant::Plain, 8);
        const double dev = sup_deviation(f, built.reg.system, 3.0, built.epsilon * 0.5);
        REQUIRE(dev <= 1.0 / k + 1e-6);
        REQUIRE(dev <= prev_dev * 1.1);
        prev_dev = dev;
    }
}

TEST_CASE("fitted aux constants of the plain cubic pipeline") {
    auto f = cubic();
    std::vector<double> gammas, d1s, d2s;
    for (double k : {4.0, 8.0}) {
        auto built = build_smoothed(f, k, TailVariant::Plain, 8);
        auto rep = check_aux_bounds(built.reg.system, make_plan(built.reg.system), f.C2);
        REQUIRE(rep.verdict == Verdict::PassWithConstant);
        REQUIRE(rep.constants.at("gamma") >= std::min(1.0, f.alpha) - 0.01);
        REQUIRE(rep.constants.at("D2") >= f.C2);  // here C2 = 0
        gammas.push_back(rep.constants.at("gamma"));
        d1s.push_back(rep.constants.at("D1"));
        d2s.push_back(rep.constants.at("D2"));
    }
    REQUIRE(relative_spread(gammas) < 0.05);
    REQUIRE(relative_spread(d1s) < 0.05);
    REQUIRE(relative_spread(d2s) < 0.05);
}

TEST_CASE("aux constants stay put across k for the competition pipeline") {
    auto lv = lotka_volterra(LVParams::constant({1, 1, 1}, 1.0, {1, 1, 1}));
    SamplePlan plan = make_plan(lv);
    plan.radii = {0.1, 1.0, 2.5, 5.0};  // inside every plateau of the k sweep
    plan.per_ball = 256;
    std::vector<double> gammas, d1s, d2s;
    ProbeLattice probe;
    probe.samples_nd = 1024;
    for (double k : {5.0, 10.0}) {
        auto built = build_smoothed(lv, k, TailVariant::Affine, 6, probe);
        auto rep = check_aux_bounds(built.reg.system, plan, lv.C2);
        gammas.push_back(rep.constants.at("gamma"));
        d1s.push_back(rep.constants.at("D1"));
        d2s.push_back(rep.constants.at("D2"));
        REQUIRE(rep.constants.at("D2") >= 0.0);
        REQUIRE(rep.constants.at("D3") >= 0.0);
    }
    REQUIRE(relative_spread(gammas) < 0.05);
    REQUIRE(relative_spread(d1s) < 0.05);
    REQUIRE(relative_spread(d2s) < 0.05);
}

TEST_CASE("blended pair construction") {
    auto lv = lotka_volterra(LVParams::constant({1, 1, 1}, 1.0, {1, 1, 1}));
    auto lg = uncoupled_logistic({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    ProbeLattice probe;
    probe.samples_nd = 512;
    auto pair = build_blended_pair(lv, lg, 2.0, 3.0, 0.5, 6, probe);
    REQUIRE(pair.delta_nk > 0.0);
    REQUIRE(pair.delta_nk < 1.0);

    // shifted mollified ordering inside |u| <= n+2 on the cone
    Rng rng(17);
    for (int s = 0; s < 200; ++s) {
        auto u = rng.in_ball(3, pair.n + 2.0);
        for (double& x : u) x = std::abs(x);
        auto f1 = eval_reaction(pair.l1, 0.0, u);
        auto f2 = eval_reaction(pair.l2, 0.0, u);
        for (int i = 0; i < 3; ++i) REQUIRE(f1[i] >= f2[i] - 1e-10);
    }

    // relaxed cooperativity of the dominated side: epsilon = 2 delta_nk
    SamplePlan plan = make_plan(pair.l2, pair.n);
    plan.per_ball = 128;
    auto rep = check_cooperative(pair.l2, pair.n, 2.0 * pair.delta_nk, plan);
    REQUIRE(rep.verdict == Verdict::Pass);
}

TEST_CASE("pipeline transformers reject oversized component counts") {
    ReactionSystem wide;
    wide.d = 9;
    wide.name = "wide";
    wide.diffusion.assign(9, 1.0);
    wide.exponents.assign(9, 2.0);
    wide.sublinear = true;
    wide.eval = [](double, std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    REQUIRE_THROWS_AS(truncate(wide, 2.0, TailVariant::Plain), Error);
}

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "rdlab/common.hpp"

namespace rdlab {

using EvalFn = std::function<void(double t, std::span<const double> u, std::span<double> out)>;
using JacFn = std::function<void(double t, std::span<const double> u, std::span<double> jac)>;
using ForcingFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

// A d-component nonlinearity f(t,u) with forcing h, written as it appears on
// the left of du/dt - D*Lap(u) + f(t,u) = h. The structural constants are
// declared by the model and certified numerically by the check_* routines.
struct ReactionSystem {
    int d = 1;
    EvalFn eval;
    JacFn jac;          // null -> finite-difference fallback
    ForcingFn forcing;  // null -> zero
    std::vector<double> diffusion;  // D_i > 0
    std::vector<double> exponents;  // growth exponents p_i >= 2
    bool sublinear = false;         // |f| <= C1(1+|u|) regime, p_i = 2
    double alpha = 1.0;
    double C1 = 1.0;
    double C2 = 1.0;
    bool positive_cone_only = false;
    bool autonomous = true;
    std::string name;

    void validate() const {
        require(d >= 1, "ReactionSystem: d must be >= 1");
        require(static_cast<int>(diffusion.size()) == d, "ReactionSystem: diffusion size");
        require(static_cast<int>(exponents.size()) == d, "ReactionSystem: exponents size");
        for (double D : diffusion) require(D > 0.0, "ReactionSystem: D_i must be positive");
        for (double p : exponents)
            require(p >= 2.0, "ReactionSystem: exponents must be >= 2");
        if (sublinear)
            for (double p : exponents)
                require(p == 2.0, "ReactionSystem: sublinear systems have p_i = 2");
    }
};

inline std::vector<double> eval_reaction(const ReactionSystem& sys, double t,
                                         std::span<const double> u) {
    require(static_cast<int>(u.size()) == sys.d, "eval_reaction: dimension mismatch");
    require(all_finite(u), "eval_reaction: non-finite input state");
    std::vector<double> out(sys.d);
    sys.eval(t, u, out);
    if (!all_finite(out)) {
        std::ostringstream os;
        os << "eval_reaction: non-finite output of '" << sys.name << "' at t=" << t << ", u=(";
        for (int i = 0; i < sys.d; ++i) os << (i ? "," : "") << u[i];
        os << ")";
        throw Error(os.str());
    }
    return out;
}

inline void eval_forcing(const ReactionSystem& sys, double t, std::span<const double> x,
                         std::span<double> out) {
    if (sys.forcing) {
        sys.forcing(t, x, out);
    } else {
        std::fill(out.begin(), out.end(), 0.0);
    }
}

// Analytic Jacobian if the model supplies one, else central differences with
// step eps_fd * max(1,|u_j|), eps_fd = cbrt(machine epsilon).
inline std::vector<double> jacobian(const ReactionSystem& sys, double t,
                                    std::span<const double> u) {
    std::vector<double> J(static_cast<std::size_t>(sys.d) * sys.d);
    if (sys.jac) {
        sys.jac(t, u, J);
        return J;
    }
    const double eps_fd = std::cbrt(std::numeric_limits<double>::epsilon());
    std::vector<double> up(u.begin(), u.end()), um(u.begin(), u.end());
    for (int j = 0; j < sys.d; ++j) {
        const double h = eps_fd * std::max(1.0, std::abs(u[j]));
        up[j] = u[j] + h;
        um[j] = u[j] - h;
        auto fp = eval_reaction(sys, t, up);
        auto fm = eval_reaction(sys, t, um);
        for (int i = 0; i < sys.d; ++i) J[i * sys.d + j] = (fp[i] - fm[i]) / (2.0 * h);
        up[j] = u[j];
        um[j] = u[j];
    }
    return J;
}

// Smallest eigenvalue of the symmetric part of a small dense matrix, by
// cyclic Jacobi rotations.
inline double sym_eigen_min(std::vector<double> A, int d) {
    std::vector<double> S(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) S[i * d + j] = 0.5 * (A[i * d + j] + A[j * d + i]);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off += sq(S[p * d + q]);
        if (off < 1e-28) break;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double apq = S[p * d + q];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = 0.5 * std::atan2(2.0 * apq, S[q * d + q] - S[p * d + p]);
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < d; ++k) {
                    const double skp = S[k * d + p], skq = S[k * d + q];
                    S[k * d + p] = c * skp - s * skq;
                    S[k * d + q] = s * skp + c * skq;
                }
                for (int k = 0; k < d; ++k) {
                    const double spk = S[p * d + k], sqk = S[q * d + k];
                    S[p * d + k] = c * spk - s * sqk;
                    S[q * d + k] = s * spk + c * sqk;
                }
            }
        }
    }
    double m = S[0];
    for (int i = 1; i < d; ++i) m = std::min(m, S[i * d + i]);
    return m;
}

// ---------------------------------------------------------------------------
// Sampling plans and condition reports

struct Sample {
    double t = 0.0;
    std::vector<double> u;
};

// Deterministic sample plan: per ball radius, a fixed count of seeded uniform
// points, plus all axis rays and the all-ones direction. The positive-cone
// flag folds samples by absolute value.
struct SamplePlan {
    std::uint64_t seed = 0x5eedULL;
    std::vector<double> radii{0.1, 1.0, 10.0};
    int per_ball = 512;
    std::vector<double> times{0.0};
    bool positive_cone = false;
    std::vector<std::vector<double>> x_points;  // spatial points for forcing terms

    std::vector<Sample> generate(int d) const {
        Rng rng(seed);
        std::vector<Sample> out;
        out.reserve(radii.size() * (per_ball + 2 * d + 1));
        std::size_t tick = 0;
        auto next_t = [&] { return times[tick++ % times.size()]; };
        auto push = [&](std::vector<double> u) {
            if (positive_cone)
                for (double& x : u) x = std::abs(x);
            out.push_back({next_t(), std::move(u)});
        };
        for (double r : radii) {
            for (int s = 0; s < per_ball; ++s) push(rng.in_ball(d, r));
            for (int i = 0; i < d; ++i) {
                std::vector<double> e(d, 0.0);
                e[i] = r;
                push(e);
                e[i] = -r;
                push(e);
            }
            push(std::vector<double>(d, r / std::sqrt(static_cast<double>(d))));
        }
        return out;
    }
};

inline SamplePlan make_plan(const ReactionSystem& sys, double R0 = 1.0,
                            std::uint64_t seed = 0x5eedULL) {
    SamplePlan plan;
    plan.seed = seed;
    plan.radii = {0.1, 1.0, R0, 10.0};
    std::sort(plan.radii.begin(), plan.radii.end());
    plan.radii.erase(std::unique(plan.radii.begin(), plan.radii.end()), plan.radii.end());
    plan.positive_cone = sys.positive_cone_only;
    if (!sys.autonomous) plan.times = {0.0, 0.5, 1.0};
    for (int i = 0; i <= 8; ++i) plan.x_points.push_back({i / 8.0});
    return plan;
}

enum class Verdict { Pass, Fail, PassWithConstant };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "pass-with-constant";
    }
}

struct Witness {
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> v;  // second point, for pairwise conditions
    double margin = 0.0;
};

struct ConditionReport {
    std::string condition;
    Verdict verdict = Verdict::Pass;
    std::map<std::string, double> constants;
    Witness witness;  // worst sampled point; strictly violating margin on fail
    int sample_count = 0;
    std::uint64_t seed = 0;
    std::string note;

    bool passed() const { return verdict != Verdict::Fail; }
};

// ---------------------------------------------------------------------------
// Structural condition certifiers. These are falsifiers on samples, not
// proofs: a pass means "held on N seeded samples".

// Growth bound: sum_i |f^i|^{p_i/(p_i-1)} <= C1 (1 + sum_i |u^i|^{p_i}),
// or |f| <= C1 (1+|u|) in the sublinear regime.
inline ConditionReport check_growth(const ReactionSystem& sys, const SamplePlan& plan) {
    ConditionReport rep;
    rep.condition = "growth";
    rep.seed = plan.seed;
    double fitted = 0.0, worst = std::numeric_limits<double>::infinity();
    for (const auto& s : plan.generate(sys.d)) {
        auto f = eval_reaction(sys, s.t, s.u);
        double lhs, base;
        if (sys.sublinear) {
            lhs = norm2(f);
            base = 1.0 + norm2(s.u);
        } else {
            lhs = 0.0;
            base = 1.0;
            for (int i = 0; i < sys.d; ++i) {
                const double p = sys.exponents[i];
                lhs += std::pow(std::abs(f[i]), p / (p - 1.0));
                base += std::pow(std::abs(s.u[i]), p);
            }
        }
        fitted = std::max(fitted, lhs / base);
        // rounding allowance: the two sides are sums of independently rounded
        // powers, so an identity can miss zero by an ulp
        const double margin = sys.C1 * base - lhs + 1e-12 * (1.0 + lhs + sys.C1 * base);
        if (margin < worst) {
            worst = margin;
            rep.witness = {s.t, s.u, {}, margin};
        }
        ++rep.sample_count;
    }
    rep.constants["declared_C1"] = sys.C1;
    rep.constants["fitted_C1"] = fitted;
    rep.verdict = worst >= 0.0 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

// Dissipation bound: (f(t,u),u) >= alpha sum_i |u^i|^{p_i} - C2. Reports the
// maximal alpha passing on the samples for the declared C2, and whether that
// alpha is non-positive (which routes comparisons through the exponential
// change of variable).
inline ConditionReport check_dissipation(const ReactionSystem& sys, const SamplePlan& plan) {
    ConditionReport rep;
    rep.condition = "dissipation";
    rep.seed = plan.seed;
    double fitted = std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : plan.generate(sys.d)) {
        auto f = eval_reaction(sys, s.t, s.u);
        double dot = 0.0, powers = 0.0;
        for (int i = 0; i < sys.d; ++i) {
            dot += f[i] * s.u[i];
            powers += std::pow(std::abs(s.u[i]), sys.exponents[i]);
        }
        if (powers > 1e-9) fitted = std::min(fitted, (dot + sys.C2) / powers);
        const double margin = dot - sys.alpha * powers + sys.C2 +
                              1e-12 * (1.0 + std::abs(dot) + std::abs(sys.alpha) * powers);
        if (margin < worst) {
            worst = margin;
            rep.witness = {s.t, s.u, {}, margin};
        }
        ++rep.sample_count;
    }
    rep.constants["declared_alpha"] = sys.alpha;
    rep.constants["declared_C2"] = sys.C2;
    rep.constants["fitted_alpha"] = fitted;
    rep.constants["alpha_nonpositive"] = fitted <= 0.0 ? 1.0 : 0.0;
    rep.verdict = worst >= 0.0 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

// One-sided Lipschitz constant: C3 = max over samples of -lambda_min of the
// symmetrized Jacobian, clamped at 0.
inline ConditionReport check_one_sided_lipschitz(const ReactionSystem& sys,
                                                 const SamplePlan& plan) {
    ConditionReport rep;
    rep.condition = "one_sided_lipschitz";
    rep.seed = plan.seed;
    double c3 = 0.0;
    for (const auto& s : plan.generate(sys.d)) {
        auto J = jacobian(sys, s.t, s.u);
        const double lam = sym_eigen_min(J, sys.d);
        if (-lam > c3) {
            c3 = -lam;
            rep.witness = {s.t, s.u, {}, lam};
        }
        ++rep.sample_count;
    }
    rep.constants["fitted_C3"] = c3;
    rep.verdict = Verdict::PassWithConstant;
    return rep;
}

// Cooperativity in the ball of radius R0, relaxed by epsilon:
//   f^i(t,u) >= f^i(t,v) - epsilon  whenever u^i = v^i, u^j <= v^j (j != i).
// Two tests, both applied: a direct pairwise test on ordered pairs, and the
// off-diagonal Jacobian test dF^i/du^j <= epsilon/R0. Verdict is the
// conjunction; the witness is from the first failure.
inline ConditionReport check_cooperative(const ReactionSystem& sys, double R0, double epsilon,
                                         const SamplePlan& plan) {
    require(R0 > 0.0, "check_cooperative: R0 must be positive");
    require(epsilon >= 0.0, "check_cooperative: epsilon must be >= 0");
    ConditionReport rep;
    rep.condition = "cooperative";
    rep.seed = plan.seed;
    rep.constants["R0"] = R0;
    rep.constants["epsilon"] = epsilon;
    bool failed = false;
    double worst = std::numeric_limits<double>::infinity();
    double worst_pairwise = std::numeric_limits<double>::infinity();
    double worst_jacobian = std::numeric_limits<double>::infinity();

    Rng rng(plan.seed ^ 0x9e3779b97f4a7c15ULL);
    const int n_pairs = plan.per_ball;
    for (int s = 0; s < n_pairs && sys.d > 1; ++s) {
        auto u = rng.in_ball(sys.d, R0);
        if (plan.positive_cone || sys.positive_cone_only)
            for (double& x : u) x = std::abs(x);
        const int i = s % sys.d;
        // v dominates u off the i-th component; halve the bumps until the
        // pair stays inside the ball.
        std::vector<double> bump(sys.d, 0.0);
        for (int j = 0; j < sys.d; ++j)
            if (j != i) bump[j] = rng.uniform01() * R0 * 0.25;
        std::vector<double> v(sys.d);
        for (int halve = 0; halve < 60; ++halve) {
            for (int j = 0; j < sys.d; ++j) v[j] = u[j] + bump[j];
            if (norm2(v) <= R0) break;
            for (double& b : bump) b *= 0.5;
        }
        const double t = plan.times[s % plan.times.size()];
        auto fu = eval_reaction(sys, t, u);
        auto fv = eval_reaction(sys, t, v);
        const double margin = fu[i] - fv[i] + epsilon;
        if (margin < worst) worst = margin;
        if (margin < worst_pairwise) worst_pairwise = margin;
        if (margin < 0.0 && !failed) {
            failed = true;
            rep.witness = {t, u, v, margin};
        }
        ++rep.sample_count;
    }

    SamplePlan ball = plan;
    ball.radii = {R0 * 0.25, R0 * 0.99};
    for (const auto& s : ball.generate(sys.d)) {
        auto J = jacobian(sys, s.t, s.u);
        for (int i = 0; i < sys.d; ++i) {
            for (int j = 0; j < sys.d; ++j) {
                if (i == j) continue;
                const double margin = epsilon / R0 - J[i * sys.d + j];
                if (margin < worst) worst = margin;
                if (margin < worst_jacobian) worst_jacobian = margin;
                if (margin < 0.0 && !failed) {
                    failed = true;
                    rep.witness = {s.t, s.u, {}, margin};
                    rep.note = "off-diagonal jacobian entry " + std::to_string(i) + "," +
                               std::to_string(j) + " exceeds epsilon/R0";
                }
            }
        }
        ++rep.sample_count;
    }

    rep.constants["worst_margin"] = worst;
    rep.constants["pairwise_worst"] = worst_pairwise;
    rep.constants["jacobian_worst"] = worst_jacobian;
    rep.verdict = failed ? Verdict::Fail : Verdict::Pass;
    return rep;
}

// Compatibility with the positive cone: h^i(t,x) - f^i(t, u with u^i = 0) >= 0
// for u >= 0 off the i-th component.
inline ConditionReport check_positivity_compat(const ReactionSystem& sys,
                                               const SamplePlan& plan) {
    ConditionReport rep;
    rep.condition = "positivity_compat";
    rep.seed = plan.seed;
    double worst = std::numeric_limits<double>::infinity();
    std::vector<double> h(sys.d);
    std::vector<std::vector<double>> xs = plan.x_points;
    if (xs.empty()) xs.push_back({0.5});
    auto samples = plan.generate(sys.d);
    for (const auto& s : samples) {
        std::vector<double> u = s.u;
        for (double& x : u) x = std::abs(x);
        for (int i = 0; i < sys.d; ++i) {
            double saved = u[i];
            u[i] = 0.0;
            auto f = eval_reaction(sys, s.t, u);
            for (const auto& x : xs) {
                eval_forcing(sys, s.t, x, h);
                const double margin = h[i] - f[i];
                if (margin < worst) {
                    worst = margin;
                    rep.witness = {s.t, u, {}, margin};
                }
            }
            u[i] = saved;
            ++rep.sample_count;
        }
    }
    rep.constants["worst_margin"] = worst;
    rep.verdict = worst >= 0.0 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

// Domination of one problem by another: f1^i(t,u) >= f2^i(t,u) for all
// components, and h1 <= h2 at the sampled (t,x).
inline ConditionReport dominates(const ReactionSystem& sys1, const ReactionSystem& sys2,
                                 const SamplePlan& plan) {
    require(sys1.d == sys2.d, "dominates: dimension mismatch");
    ConditionReport rep;
    rep.condition = "dominates";
    rep.seed = plan.seed;
    SamplePlan p = plan;
    p.positive_cone = plan.positive_cone || sys1.positive_cone_only || sys2.positive_cone_only;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : p.generate(sys1.d)) {
        auto f1 = eval_reaction(sys1, s.t, s.u);
        auto f2 = eval_reaction(sys2, s.t, s.u);
        for (int i = 0; i < sys1.d; ++i) {
            const double margin = f1[i] - f2[i];
            if (margin < worst) {
                worst = margin;
                rep.witness = {s.t, s.u, {}, margin};
            }
        }
        ++rep.sample_count;
    }
    std::vector<double> h1(sys1.d), h2(sys1.d);
    for (double t : p.times) {
        for (const auto& x : p.x_points) {
            eval_forcing(sys1, t, x, h1);
            eval_forcing(sys2, t, x, h2);
            for (int i = 0; i < sys1.d; ++i) {
                const double margin = h2[i] - h1[i];
                if (margin < worst) {
                    worst = margin;
                    rep.witness = {t, x, {}, margin};
                    rep.note = "forcing ordering violated";
                }
            }
        }
    }
    rep.constants["worst_margin"] = worst;
    rep.verdict = worst >= 0.0 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

// ---------------------------------------------------------------------------
// Exponential change of variable v = e^{-beta t} u. The transformed
// nonlinearity is ft(t,v) = e^{-beta t} f(t, e^{beta t} v) + beta v and the
// forcing picks up e^{-beta t}. Trajectory states convert with to_v/to_u.
struct ExpShifted {
    ReactionSystem system;
    double beta = 0.0;

    std::vector<double> to_v(double t, std::span<const double> u) const {
        std::vector<double> v(u.begin(), u.end());
        const double c = std::exp(-beta * t);
        for (double& x : v) x *= c;
        return v;
    }
    std::vector<double> to_u(double t, std::span<const double> v) const {
        std::vector<double> u(v.begin(), v.end());
        const double c = std::exp(beta * t);
        for (double& x : u) x *= c;
        return u;
    }
};

inline ExpShifted exp_shift(const ReactionSystem& sys, double beta) {
    ExpShifted out;
    out.beta = beta;
    ReactionSystem t = sys;
    t.name = sys.name + "+expshift";
    const EvalFn base_eval = sys.eval;
    const int d = sys.d;
    t.eval = [base_eval, beta, d](double tt, std::span<const double> v, std::span<double> out_f) {
        const double grow = std::exp(beta * tt), shrink = std::exp(-beta * tt);
        std::vector<double> u(d);
        for (int i = 0; i < d; ++i) u[i] = grow * v[i];
        base_eval(tt, u, out_f);
        for (int i = 0; i < d; ++i) out_f[i] = shrink * out_f[i] + beta * v[i];
    };
    if (sys.jac) {
        const JacFn base_jac = sys.jac;
        t.jac = [base_jac, beta, d](double tt, std::span<const double> v, std::span<double> J) {
            const double grow = std::exp(beta * tt);
            std::vector<double> u(d);
            for (int i = 0; i < d; ++i) u[i] = grow * v[i];
            base_jac(tt, u, J);
            for (int i = 0; i < d; ++i) J[i * d + i] += beta;
        };
    } else {
        t.jac = nullptr;
    }
    if (sys.forcing) {
        const ForcingFn base_h = sys.forcing;
        t.forcing = [base_h, beta](double tt, std::span<const double> x, std::span<double> h) {
            base_h(tt, x, h);
            const double shrink = std::exp(-beta * tt);
            for (double& v : h) v *= shrink;
        };
    }
    t.autonomous = sys.autonomous && beta == 0.0;
    t.alpha = sys.sublinear ? sys.alpha + beta : sys.alpha;
    t.C1 = sys.C1 + std::abs(beta);
    out.system = std::move(t);
    return out;
}

// Growth-exponent diagnostic: least-squares log-log slope of |f^i| along the
// i-th axis ray over the outer decade, reported as p_i = slope + 1. Rays on
// which f^i vanishes give NaN ("undetermined").
inline std::vector<double> estimate_growth_exponents(const ReactionSystem& sys,
                                                     double ray_radius = 1e3,
                                                     int points = 33, double t = 0.0) {
    require(ray_radius >= 1e3, "estimate_growth_exponents: rays must extend to radius >= 1e3");
    std::vector<double> est(sys.d, std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < sys.d; ++i) {
        std::vector<double> xs, ys;
        for (int k = 0; k < points; ++k) {
            const double r = ray_radius / 10.0 *
                             std::pow(10.0, static_cast<double>(k) / (points - 1));
            std::vector<double> u(sys.d, 0.0);
            u[i] = r;
            auto f = eval_reaction(sys, t, u);
            if (std::abs(f[i]) < 1e-300) continue;
            xs.push_back(std::log(r));
            ys.push_back(std::log(std::abs(f[i])));
        }
        if (xs.size() < 2) continue;  // undetermined along this ray
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sx += xs[k];
            sy += ys[k];
            sxx += xs[k] * xs[k];
            sxy += xs[k] * ys[k];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        est[i] = slope + 1.0;
    }
    return est;
}

}  // namespace rdlab

#pragma once

#include "rdlab/reaction.hpp"

namespace rdlab {

// ---------------------------------------------------------------------------
// Smooth radial cutoffs. value = 1 on [0,inner], 0 on [outer,inf), quintic
// smoothstep in between (C^2, symmetric about the midpoint).
struct CutoffProfile {
    double inner = 1.0;
    double outer = 2.0;
};

inline CutoffProfile cutoff_plateau(double k, double width = 1.0) { return {k, k + width}; }

inline CutoffProfile cutoff_outer(double n, double gamma_bar) {
    require(gamma_bar > 0.0 && gamma_bar < 1.0, "cutoff_outer: gamma_bar in (0,1)");
    return {n + 1.0 + gamma_bar, n + 2.0};
}

inline double smooth_cutoff(const CutoffProfile& c, double s) {
    require(s >= 0.0, "smooth_cutoff: radial argument must be >= 0");
    if (s <= c.inner) return 1.0;
    if (s >= c.outer) return 0.0;
    const double x = (s - c.inner) / (c.outer - c.inner);
    const double step = x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    return 1.0 - step;
}

// ---------------------------------------------------------------------------
// Pipeline bookkeeping: each transformer yields a new immutable system plus a
// record of what was applied. An empty stage list is the base system itself.
struct Stage {
    std::string kind;
    double k = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double gamma_bar = 0.0;
    int multiplier = 0;
    int quad_order = 0;
    std::string tail;
};

struct RegularizedSystem {
    ReactionSystem base;
    ReactionSystem system;
    std::vector<Stage> stages;

    static RegularizedSystem wrap(const ReactionSystem& sys) { return {sys, sys, {}}; }
};

enum class TailVariant { Plain, Affine, Mixed };

inline const char* to_string(TailVariant t) {
    switch (t) {
        case TailVariant::Plain: return "plain";
        case TailVariant::Affine: return "affine";
        default: return "mixed";
    }
}

// Truncation blend: inside |u| <= k the output is f exactly; outside the
// cutoff it is the dissipative monomial tail g^i = |u^i|^{p_i-2} u^i, with
// two stronger variants:
//   Affine  adds f^i(t,0)                     (keeps cone compatibility)
//   Mixed   adds |u^i|^{q_i-2} u^i + f^i(t,0) (2 <= q_i <= p_i)
inline RegularizedSystem truncate(const RegularizedSystem& in, double k, TailVariant tail,
                                  std::vector<double> q_exponents = {}) {
    require(k >= 1.0, "truncate: k must be >= 1");
    require(in.system.d <= 8, "truncate: component count above the stack-buffer limit");
    if (tail == TailVariant::Mixed) {
        require(q_exponents.size() == static_cast<std::size_t>(in.system.d),
                "truncate: mixed tail needs one q per component");
        for (int i = 0; i < in.system.d; ++i)
            require(q_exponents[i] >= 2.0 && q_exponents[i] <= in.system.exponents[i],
                    "truncate: mixed tail needs 2 <= q_i <= p_i");
    }
    RegularizedSystem out = in;
    const EvalFn prev = in.system.eval;
    const std::vector<double> p = in.system.exponents;
    const std::vector<double> q = q_exponents;
    const int d = in.system.d;
    const CutoffProfile prof = cutoff_plateau(k);
    out.system.eval = [prev, p, q, d, prof, tail](double t, std::span<const double> u,
                                                  std::span<double> f) {
        const double r = norm2(u);
        if (r <= prof.inner) {  // plateau: bit-identical to the base system
            prev(t, u, f);
            return;
        }
        const double psi = smooth_cutoff(prof, r);
        std::array<double, 8> gbuf{};
        std::span<double> g(gbuf.data(), d);
        std::array<double, 8> zbuf{};
        for (int i = 0; i < d; ++i) g[i] = signed_pow(u[i], p[i]);
        if (tail != TailVariant::Plain) {
            std::array<double, 8> f0buf{};
            std::span<double> f0(f0buf.data(), d);
            prev(t, std::span<const double>(zbuf.data(), d), f0);
            for (int i = 0; i < d; ++i) g[i] += f0[i];
            if (tail == TailVariant::Mixed)
                for (int i = 0; i < d; ++i) g[i] += signed_pow(u[i], q[i]);
        }
        if (psi == 0.0) {
            for (int i = 0; i < d; ++i) f[i] = g[i];
            return;
        }
        prev(t, u, f);
        for (int i = 0; i < d; ++i) f[i] = psi * f[i] + (1.0 - psi) * g[i];
    };
    out.system.jac = nullptr;
    out.system.name = in.system.name + "+truncate";
    Stage st;
    st.kind = "truncate";
    st.k = k;
    st.tail = to_string(tail);
    out.stages.push_back(st);
    return out;
}

inline RegularizedSystem truncate(const ReactionSystem& sys, double k, TailVariant tail,
                                  std::vector<double> q_exponents = {}) {
    return truncate(RegularizedSystem::wrap(sys), k, tail, std::move(q_exponents));
}

// ---------------------------------------------------------------------------
// Mollifier: the standard bump c * exp(1/((|x|/eps)^2 - 1)) on |x| < eps,
// sampled on a tensor Gauss-Legendre rule over [-eps,eps]^dim. The constant
// is chosen so the stored rule integrates the density to exactly 1; the
// convolution below then reproduces linear maps to rounding.
struct Mollifier {
    double epsilon = 0.0;
    int dim = 1;
    int quad_order = 8;
    double normalization = 0.0;
    std::vector<std::array<double, 3>> nodes;
    std::vector<double> node_weights;  // quadrature weight times density; sums to 1

    double density(std::span<const double> x) const {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        const double s2 = r2 / (epsilon * epsilon);
        if (s2 >= 1.0) return 0.0;
        return normalization * std::exp(1.0 / (s2 - 1.0));
    }
};

inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (t * p0 - p1) / (t * t - 1.0);
            const double dt = p0 / pp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * pp * pp);
    }
}

inline Mollifier make_mollifier(double epsilon, int dim, int quad_order = 8) {
    require(epsilon > 0.0, "make_mollifier: epsilon must be positive");
    require(dim >= 1 && dim <= 3, "make_mollifier: tensor quadrature supports dim <= 3");
    require(quad_order >= 4, "make_mollifier: quadrature order must be >= 4");
    Mollifier m;
    m.epsilon = epsilon;
    m.dim = dim;
    m.quad_order = quad_order;
    std::vector<double> gx, gw;
    gauss_legendre(quad_order, gx, gw);

    const int total = static_cast<int>(std::pow(quad_order, dim));
    m.nodes.reserve(total);
    m.node_weights.reserve(total);
    double raw_sum = 0.0;
    std::array<int, 3> idx{0, 0, 0};
    for (int flat = 0; flat < total; ++flat) {
        int rem = flat;
        for (int a = 0; a < dim; ++a) {
            idx[a] = rem % quad_order;
            rem /= quad_order;
        }
        std::array<double, 3> s{0.0, 0.0, 0.0};
        double w = 1.0, r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            s[a] = epsilon * gx[idx[a]];
            w *= epsilon * gw[idx[a]];
            r2 += s[a] * s[a];
        }
        const double s2 = r2 / (epsilon * epsilon);
        const double bump = s2 < 1.0 ? std::exp(1.0 / (s2 - 1.0)) : 0.0;
        m.nodes.push_back(s);
        m.node_weights.push_back(w * bump);
        raw_sum += w * bump;
    }
    m.normalization = 1.0 / raw_sum;
    for (double& w : m.node_weights) w *= m.normalization;
    return m;
}

// Convolution in u: eval(t,u) = sum_q w_q f(t, u - s_q). Smooth in u; time
// passes through untouched.
inline RegularizedSystem mollify(const RegularizedSystem& in, const Mollifier& mol) {
    require(in.system.d <= 3, "mollify: unsupported dimension (d must be <= 3)");
    require(mol.dim == in.system.d, "mollify: mollifier dimension mismatch");
    RegularizedSystem out = in;
    const EvalFn prev = in.system.eval;
    const int d = in.system.d;
    const std::vector<std::array<double, 3>> nodes = mol.nodes;
    const std::vector<double> weights = mol.node_weights;
    out.system.eval = [prev, d, nodes, weights](double t, std::span<const double> u,
                                                std::span<double> f) {
        std::array<double, 3> acc{0.0, 0.0, 0.0};
        std::array<double, 3> shifted{0.0, 0.0, 0.0};
        std::array<double, 3> val{0.0, 0.0, 0.0};
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            for (int i = 0; i < d; ++i) shifted[i] = u[i] - nodes[q][i];
            prev(t, std::span<const double>(shifted.data(), d), std::span<double>(val.data(), d));
            for (int i = 0; i < d; ++i) acc[i] += weights[q] * val[i];
        }
        for (int i = 0; i < d; ++i) f[i] = acc[i];
    };
    out.system.jac = nullptr;
    out.system.name = in.system.name + "+mollify";
    Stage st;
    st.kind = "mollify";
    st.epsilon = mol.epsilon;
    st.quad_order = mol.quad_order;
    out.stages.push_back(st);
    return out;
}

inline RegularizedSystem mollify(const ReactionSystem& sys, const Mollifier& mol) {
    return mollify(RegularizedSystem::wrap(sys), mol);
}

// ---------------------------------------------------------------------------
// Probe sets for modulus-of-continuity and sup-deviation measurements. In 1d
// a uniform lattice is used (capped in size; spacing <= eps/2 whenever the
// cap allows). In higher dimensions dense lattices are infeasible, so seeded
// ball samples plus axis/diagonal rays stand in.
struct ProbeLattice {
    std::uint64_t seed = 0xa11ceULL;
    int max_points_1d = 1 << 18;
    int samples_nd = 4096;
};

namespace detail {

template <typename PointFn>
void probe_points(int d, double radius, const ProbeLattice& probe, double spacing,
                  PointFn&& visit) {
    if (d == 1) {
        int n = static_cast<int>(std::ceil(2.0 * radius / spacing)) + 1;
        n = std::min(n, probe.max_points_1d);
        const double step = 2.0 * radius / (n - 1);
        for (int i = 0; i < n; ++i) visit(std::vector<double>{-radius + i * step});
        return;
    }
    Rng rng(probe.seed);
    for (int s = 0; s < probe.samples_nd; ++s) visit(rng.in_ball(d, radius));
    const int rays = 16;
    for (int i = 0; i < d; ++i) {
        for (int k = 1; k <= rays; ++k) {
            std::vector<double> u(d, 0.0);
            u[i] = radius * k / rays;
            visit(u);
            u[i] = -u[i];
            visit(u);
        }
    }
    for (int k = 1; k <= rays; ++k)
        visit(std::vector<double>(d, radius * k / rays / std::sqrt(static_cast<double>(d))));
}

}  // namespace detail

// Sampled modulus of continuity of sys on |u| <= radius with increments below
// eps: max |f(t,u) - f(t,u+s)| over probe points and offsets |s| < eps.
inline double sampled_modulus(const ReactionSystem& sys, double radius, double eps,
                              const ProbeLattice& probe, std::span<const double> times) {
    const int d = sys.d;
    double mod = 0.0;
    std::vector<double> shifted(d);
    const double off = eps * (1.0 - 1e-9);
    std::vector<std::vector<double>> dirs;
    for (int a = 0; a < d; ++a) {
        std::vector<double> e(d, 0.0);
        e[a] = off;
        dirs.push_back(e);
        e[a] = -off;
        dirs.push_back(e);
        e[a] = off * 0.5;
        dirs.push_back(e);
    }
    if (d > 1) {
        Rng rng(probe.seed ^ 0xd1ce);
        for (int s = 0; s < 4; ++s) {
            auto p = rng.in_ball(d, 1.0);
            const double n = norm2(p);
            if (n < 1e-12) continue;
            for (double& x : p) x *= off / n;
            dirs.push_back(p);
        }
    }
    detail::probe_points(d, radius, probe, eps * 0.5, [&](const std::vector<double>& u) {
        for (double t : times) {
            auto fu = eval_reaction(sys, t, u);
            for (const auto& dir : dirs) {
                for (int i = 0; i < d; ++i) shifted[i] = u[i] + dir[i];
                auto fs = eval_reaction(sys, t, shifted);
                for (int i = 0; i < d; ++i) mod = std::max(mod, std::abs(fu[i] - fs[i]));
            }
        }
    });
    return mod;
}

// Largest eps from the halving schedule {1/2, 1/4, ...} whose sampled modulus
// on |u| <= k+1 is at most 1/k. Terminates by continuity.
inline double select_epsilon(const ReactionSystem& sys_k, double k,
                             const ProbeLattice& probe = {},
                             std::vector<double> times = {0.0}) {
    require(k >= 1.0, "select_epsilon: k must be >= 1");
    double eps = 0.5;
    for (int it = 0; it < 40; ++it) {
        if (sampled_modulus(sys_k, k + 1.0, eps, probe, times) <= 1.0 / k) return eps;
        eps *= 0.5;
    }
    return eps;
}

// Constant downward shift F^i = f^i - multiplier * delta.
inline RegularizedSystem shift(const RegularizedSystem& in, double delta, int multiplier) {
    require(delta >= 0.0, "shift: delta must be >= 0");
    require(multiplier >= 0, "shift: multiplier must be a natural number");
    RegularizedSystem out = in;
    const EvalFn prev = in.system.eval;
    const double off = static_cast<double>(multiplier) * delta;
    const int d = in.system.d;
    out.system.eval = [prev, off, d](double t, std::span<const double> u, std::span<double> f) {
        prev(t, u, f);
        for (int i = 0; i < d; ++i) f[i] -= off;
    };
    out.system.jac = in.system.jac;  // constant shift leaves the Jacobian alone
    out.system.name = in.system.name + "+shift";
    Stage st;
    st.kind = "shift";
    st.delta = delta;
    st.multiplier = multiplier;
    out.stages.push_back(st);
    return out;
}

inline RegularizedSystem shift(const ReactionSystem& sys, double delta, int multiplier) {
    return shift(RegularizedSystem::wrap(sys), delta, multiplier);
}

// Outer blend: equals the inner system for |u| <= n+1+gamma_bar and the outer
// system for |u| >= n+2.
inline RegularizedSystem outer_blend(const RegularizedSystem& inner, const ReactionSystem& outer,
                                     double n, double gamma_bar) {
    require(inner.system.d == outer.d, "outer_blend: dimension mismatch");
    require(inner.system.d <= 8, "outer_blend: component count above the stack-buffer limit");
    RegularizedSystem out = inner;
    const EvalFn inner_eval = inner.system.eval;
    const EvalFn outer_eval = outer.eval;
    const int d = inner.system.d;
    const CutoffProfile prof = cutoff_outer(n, gamma_bar);
    out.system.eval = [inner_eval, outer_eval, d, prof](double t, std::span<const double> u,
                                                        std::span<double> f) {
        const double r = norm2(u);
        if (r <= prof.inner) {
            inner_eval(t, u, f);
            return;
        }
        if (r >= prof.outer) {
            outer_eval(t, u, f);
            return;
        }
        const double phi = smooth_cutoff(prof, r);
        std::array<double, 8> obuf{};
        std::span<double> o(obuf.data(), d);
        inner_eval(t, u, f);
        outer_eval(t, u, o);
        for (int i = 0; i < d; ++i) f[i] = phi * f[i] + (1.0 - phi) * o[i];
    };
    out.system.jac = nullptr;
    out.system.name = inner.system.name + "+blend";
    Stage st;
    st.kind = "outer_blend";
    st.k = n;
    st.gamma_bar = gamma_bar;
    out.stages.push_back(st);
    return out;
}

// Sampled sup-norm deviation max_i |a^i - b^i| over |u| <= radius.
inline double sup_deviation(const ReactionSystem& a, const ReactionSystem& b, double radius,
                            double spacing, const ProbeLattice& probe = {},
                            std::span<const double> times = std::span<const double>()) {
    require(a.d == b.d, "sup_deviation: dimension mismatch");
    static const double t0[] = {0.0};
    std::span<const double> ts = times.empty() ? std::span<const double>(t0, 1) : times;
    double dev = 0.0;
    detail::probe_points(a.d, radius, probe, spacing, [&](const std::vector<double>& u) {
        for (double t : ts) {
            auto fa = eval_reaction(a, t, u);
            auto fb = eval_reaction(b, t, u);
            for (int i = 0; i < a.d; ++i) dev = std::max(dev, std::abs(fa[i] - fb[i]));
        }
    });
    return dev;
}

// ---------------------------------------------------------------------------
// Fitted structural constants of a regularized system: growth constant D1,
// dissipation pair (gamma, D2) against the budget C2_ref + 1, and the
// one-sided Jacobian bound D3. Recorded per (k,n) so constancy across the
// pipeline parameters can be asserted by the caller.
inline ConditionReport check_aux_bounds(const ReactionSystem& sys, const SamplePlan& plan,
                                        double C2_ref) {
    ConditionReport rep;
    rep.condition = "aux_bounds";
    rep.seed = plan.seed;
    double d1 = 0.0;
    double gamma = std::numeric_limits<double>::infinity();
    auto samples = plan.generate(sys.d);
    for (const auto& s : samples) {
        auto f = eval_reaction(sys, s.t, s.u);
        double lhs = 0.0, powers = 0.0, dot = 0.0;
        for (int i = 0; i < sys.d; ++i) {
            const double p = sys.exponents[i];
            lhs += std::pow(std::abs(f[i]), p / (p - 1.0));
            powers += std::pow(std::abs(s.u[i]), p);
            dot += f[i] * s.u[i];
        }
        d1 = std::max(d1, lhs / (1.0 + powers));
        if (powers > 1e-9) gamma = std::min(gamma, (dot + C2_ref + 1.0) / powers);
    }
    gamma = std::min(gamma, 2.0);
    double d2 = 0.0, d3 = 0.0;
    for (const auto& s : samples) {
        auto f = eval_reaction(sys, s.t, s.u);
        double powers = 0.0, dot = 0.0;
        for (int i = 0; i < sys.d; ++i) {
            powers += std::pow(std::abs(s.u[i]), sys.exponents[i]);
            dot += f[i] * s.u[i];
        }
        d2 = std::max(d2, gamma * powers - dot);
        auto J = jacobian(sys, s.t, s.u);
        d3 = std::max(d3, -sym_eigen_min(J, sys.d));
        ++rep.sample_count;
    }
    rep.constants["D1"] = d1;
    rep.constants["gamma"] = gamma;
    rep.constants["D2"] = d2;
    rep.constants["D3"] = d3;
    rep.verdict = gamma > 0.0 ? Verdict::PassWithConstant : Verdict::Fail;
    return rep;
}

// Spread of a family of fitted constants, relative to max(1, largest value).
inline double relative_spread(std::span<const double> values) {
    require(!values.empty(), "relative_spread: empty input");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return (hi - lo) / std::max(1.0, std::abs(hi));
}

// ---------------------------------------------------------------------------
// Full smoothing pipeline f -> f_k -> mollified f^k with the modulus-driven
// epsilon selection.
struct SmoothedSystem {
    RegularizedSystem reg;
    double k = 0.0;
    double epsilon = 0.0;
};

inline SmoothedSystem build_smoothed(const ReactionSystem& sys, double k, TailVariant tail,
                                     int quad_order = 8, const ProbeLattice& probe = {},
                                     std::vector<double> q_exponents = {},
                                     std::vector<double> times = {0.0}) {
    SmoothedSystem out;
    out.k = k;
    auto trunc = truncate(sys, k, tail, std::move(q_exponents));
    out.epsilon = select_epsilon(trunc.system, k, probe, times);
    out.reg = mollify(trunc, make_mollifier(out.epsilon, sys.d, quad_order));
    return out;
}

// The two-sided construction used for positive-cone comparisons: truncate the
// dominating system with the mixed tail (q = partner exponents) and the
// dominated one with the affine tail, mollify both with a shared epsilon,
// shift by delta and 3*delta, and blend each back into its own tail system.
struct BlendedPair {
    ReactionSystem l1;
    ReactionSystem l2;
    double delta_nk = 0.0;
    double epsilon = 0.0;
    double n = 0.0;
    double k = 0.0;
};

inline BlendedPair build_blended_pair(const ReactionSystem& sys1, const ReactionSystem& sys2,
                                      double n, double k, double gamma_bar = 0.5,
                                      int quad_order = 8, const ProbeLattice& probe = {}) {
    require(sys1.d == sys2.d, "build_blended_pair: dimension mismatch");
    BlendedPair out;
    out.n = n;
    out.k = k;
    auto b1 = truncate(sys1, n, TailVariant::Mixed, sys2.exponents);
    auto b2 = truncate(sys2, n, TailVariant::Affine);
    const double eps = std::min(select_epsilon(b1.system, k, probe),
                                select_epsilon(b2.system, k, probe));
    out.epsilon = eps;
    const Mollifier mol = make_mollifier(eps, sys1.d, quad_order);
    auto m1 = mollify(b1, mol);
    auto m2 = mollify(b2, mol);
    const double dev1 = sup_deviation(m1.system, b1.system, n + 2.0, eps * 0.5, probe);
    const double dev2 = sup_deviation(m2.system, b2.system, n + 2.0, eps * 0.5, probe);
    out.delta_nk = std::max(dev1, dev2);
    auto f1 = shift(m1, out.delta_nk, 1);
    auto f2 = shift(m2, out.delta_nk, 3);
    out.l1 = outer_blend(f1, b1.system, n, gamma_bar).system;
    out.l2 = outer_blend(f2, b2.system, n, gamma_bar).system;
    out.l1.name = sys1.name + "+pipeline_l1";
    out.l2.name = sys2.name + "+pipeline_l2";
    return out;
}

}  // namespace rdlab

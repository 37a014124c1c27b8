#pragma once

#include "rdlab/reaction.hpp"

namespace rdlab {

using TimeFn = std::function<double(double)>;

inline TimeFn const_fn(double c) {
    return [c](double) { return c; };
}

// Three-species competition parameters: growth rates a_i(t), interaction
// coefficients a_ij(t), diffusion constants D_i. All coefficients must be
// positive at sampled times.
struct LVParams {
    std::array<TimeFn, 3> a{const_fn(1.0), const_fn(1.0), const_fn(1.0)};
    // interactions indexed [i][j], i != j
    std::array<std::array<TimeFn, 3>, 3> aij{{
        {TimeFn{}, const_fn(1.0), const_fn(1.0)},
        {const_fn(1.0), TimeFn{}, const_fn(1.0)},
        {const_fn(1.0), const_fn(1.0), TimeFn{}},
    }};
    std::array<double, 3> D{1.0, 1.0, 1.0};
    bool autonomous = true;

    static LVParams constant(std::array<double, 3> a_, double coupling,
                             std::array<double, 3> D_) {
        LVParams p;
        for (int i = 0; i < 3; ++i) {
            p.a[i] = const_fn(a_[i]);
            for (int j = 0; j < 3; ++j)
                if (i != j) p.aij[i][j] = const_fn(coupling);
        }
        p.D = D_;
        p.autonomous = true;
        return p;
    }

    double a_max(double t = 0.0) const {
        return std::max({a[0](t), a[1](t), a[2](t)});
    }
};

namespace detail {

// Conservative growth/dissipation constants for the cubic-type competition
// systems on the positive cone: (f,u) >= sum u_i^3 - A sum u_i^2 and
// (1/2)x^3 - A x^2 has minimum -(16/27) A^3.
inline void cubic_cone_constants(double a_bound, double coupling_bound, ReactionSystem& sys) {
    sys.alpha = 0.5;
    sys.C2 = 16.0 / 27.0 * 3.0 * std::pow(a_bound, 3.0) + 1.0;
    const double m = std::max({a_bound, 1.0, coupling_bound});
    sys.C1 = 24.0 * std::pow(m, 1.5);
}

}  // namespace detail

// Lotka-Volterra competition with diffusion, written with the nonlinearity on
// the left: f^i(t,u) = -u^i (a_i - u^i - sum_j a_ij u^j), h = 0.
inline ReactionSystem lotka_volterra(const LVParams& params) {
    ReactionSystem sys;
    sys.d = 3;
    sys.name = "lotka_volterra";
    sys.diffusion.assign(params.D.begin(), params.D.end());
    sys.exponents = {3.0, 3.0, 3.0};
    sys.positive_cone_only = true;
    sys.autonomous = params.autonomous;
    const LVParams p = params;
    sys.eval = [p](double t, std::span<const double> u, std::span<double> out) {
        for (int i = 0; i < 3; ++i) {
            double rate = p.a[i](t) - u[i];
            for (int j = 0; j < 3; ++j)
                if (j != i) rate -= p.aij[i][j](t) * u[j];
            out[i] = -u[i] * rate;
        }
    };
    sys.jac = [p](double t, std::span<const double> u, std::span<double> J) {
        for (int i = 0; i < 3; ++i) {
            double rate = p.a[i](t) - u[i];
            for (int j = 0; j < 3; ++j)
                if (j != i) rate -= p.aij[i][j](t) * u[j];
            for (int j = 0; j < 3; ++j) {
                if (j == i) {
                    J[i * 3 + j] = -rate + u[i];
                } else {
                    J[i * 3 + j] = u[i] * p.aij[i][j](t);
                }
            }
        }
    };
    double a_bound = 0.0, c_bound = 0.0;
    for (double t : {0.0, 0.5, 1.0}) {
        a_bound = std::max(a_bound, p.a_max(t));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) c_bound = std::max(c_bound, p.aij[i][j](t));
    }
    detail::cubic_cone_constants(a_bound, c_bound, sys);
    sys.validate();
    return sys;
}

// Three uncoupled logistic equations: f^i(t,u) = -u^i (a_i - u^i). The
// dissipation condition holds on the positive cone (for u^i -> -infinity the
// cubic term has the wrong sign), so the system is cone-flagged.
inline ReactionSystem uncoupled_logistic(const std::array<TimeFn, 3>& a,
                                         const std::array<double, 3>& D,
                                         bool autonomous = true) {
    ReactionSystem sys;
    sys.d = 3;
    sys.name = "uncoupled_logistic";
    sys.diffusion.assign(D.begin(), D.end());
    sys.exponents = {3.0, 3.0, 3.0};
    sys.positive_cone_only = true;
    sys.autonomous = autonomous;
    sys.eval = [a](double t, std::span<const double> u, std::span<double> out) {
        for (int i = 0; i < 3; ++i) out[i] = -u[i] * (a[i](t) - u[i]);
    };
    sys.jac = [a](double t, std::span<const double> u, std::span<double> J) {
        std::fill(J.begin(), J.end(), 0.0);
        for (int i = 0; i < 3; ++i) J[i * 3 + i] = -a[i](t) + 2.0 * u[i];
    };
    double a_bound = std::max({a[0](0.0), a[1](0.0), a[2](0.0)});
    for (double t : {0.5, 1.0}) a_bound = std::max(a_bound, std::max({a[0](t), a[1](t), a[2](t)}));
    detail::cubic_cone_constants(a_bound, 0.0, sys);
    sys.validate();
    return sys;
}

inline ReactionSystem uncoupled_logistic(const std::array<double, 3>& a,
                                         const std::array<double, 3>& D) {
    return uncoupled_logistic({const_fn(a[0]), const_fn(a[1]), const_fn(a[2])}, D);
}

// Uncoupled linear system f^i(t,u) = -a_i(t) u^i: sublinear growth with a
// negative dissipation constant alpha = -max a_i, so comparisons against it
// go through the exponential change of variable.
inline ReactionSystem uncoupled_linear(const std::array<TimeFn, 3>& a,
                                       const std::array<double, 3>& D,
                                       bool autonomous = true) {
    ReactionSystem sys;
    sys.d = 3;
    sys.name = "uncoupled_linear";
    sys.diffusion.assign(D.begin(), D.end());
    sys.exponents = {2.0, 2.0, 2.0};
    sys.sublinear = true;
    sys.autonomous = autonomous;
    sys.eval = [a](double t, std::span<const double> u, std::span<double> out) {
        for (int i = 0; i < 3; ++i) out[i] = -a[i](t) * u[i];
    };
    sys.jac = [a](double t, std::span<const double>, std::span<double> J) {
        std::fill(J.begin(), J.end(), 0.0);
        for (int i = 0; i < 3; ++i) J[i * 3 + i] = -a[i](t);
    };
    double a_bound = 0.0;
    for (double t : {0.0, 0.5, 1.0}) a_bound = std::max(a_bound, std::max({a[0](t), a[1](t), a[2](t)}));
    sys.alpha = -a_bound;
    sys.C1 = std::max(1.0, a_bound);
    sys.C2 = 1.0;
    sys.validate();
    return sys;
}

inline ReactionSystem uncoupled_linear(const std::array<double, 3>& a,
                                       const std::array<double, 3>& D) {
    return uncoupled_linear({const_fn(a[0]), const_fn(a[1]), const_fn(a[2])}, D);
}

// Isothermal chemical autocatalysis with decay, scalar on (0,L) with Neumann
// walls: f(u) = (u-1) u^m + k u^r, growth exponent p = m+2. Fractional powers
// use max(u,0)^m so a trajectory grazing zero never evaluates to NaN.
inline ReactionSystem autocatalysis(double k_decay, double m, double r, double /*L*/) {
    require(k_decay > 0.0, "autocatalysis: k must be positive");
    require(m > 0.0 && m < 1.0 && r > 0.0 && r < 1.0, "autocatalysis: need 0 < m,r < 1");
    ReactionSystem sys;
    sys.d = 1;
    sys.name = "autocatalysis";
    sys.diffusion = {1.0};
    sys.exponents = {m + 2.0};
    sys.positive_cone_only = true;
    sys.eval = [k_decay, m, r](double, std::span<const double> u, std::span<double> out) {
        out[0] = (u[0] - 1.0) * pos_pow(u[0], m) + k_decay * pos_pow(u[0], r);
    };
    sys.jac = [k_decay, m, r](double, std::span<const double> u, std::span<double> J) {
        if (u[0] <= 0.0) {
            J[0] = 0.0;
            return;
        }
        J[0] = pos_pow(u[0], m) + (u[0] - 1.0) * m * pos_pow(u[0], m - 1.0) +
               k_decay * r * pos_pow(u[0], r - 1.0);
    };
    // On the cone (f,u) = u^{m+2} - u^{m+1} + k u^{r+1} and the middle term
    // is dominated: (1/2)x^{m+2} - x^{m+1} >= -2^{m+1} for x >= 0.
    sys.alpha = 0.5;
    sys.C2 = std::pow(2.0, m + 1.0) + 1.0;
    sys.C1 = 8.0 * (1.0 + k_decay) * (1.0 + k_decay);
    sys.validate();
    return sys;
}

// Generalized logistic nonlinearity f(u) = (u^q - 1) u^r, scalar on (0,L)
// with Neumann walls, growth exponent p = r+q+1.
inline ReactionSystem generalized_logistic(double q, double r, double /*L*/) {
    require(q > 0.0 && r > 0.0, "generalized_logistic: need q,r > 0");
    require(q + r >= 1.0, "generalized_logistic: need q + r >= 1");
    ReactionSystem sys;
    sys.d = 1;
    sys.name = "generalized_logistic";
    sys.diffusion = {1.0};
    sys.exponents = {q + r + 1.0};
    sys.positive_cone_only = true;
    sys.eval = [q, r](double, std::span<const double> u, std::span<double> out) {
        out[0] = (pos_pow(u[0], q) - 1.0) * pos_pow(u[0], r);
    };
    sys.jac = [q, r](double, std::span<const double> u, std::span<double> J) {
        if (u[0] <= 0.0) {
            J[0] = 0.0;
            return;
        }
        J[0] = (q + r) * pos_pow(u[0], q + r - 1.0) - r * pos_pow(u[0], r - 1.0);
    };
    // (f,u) = u^p - u^{r+1} on the cone; the deficit of (1/2)u^p - u^{r+1}
    // peaks at u* = (2(r+1)/p)^{1/q}.
    const double p = q + r + 1.0;
    const double ustar = std::pow(2.0 * (r + 1.0) / p, 1.0 / q);
    sys.alpha = 0.5;
    sys.C2 = std::pow(ustar, r + 1.0) - 0.5 * std::pow(ustar, p) + 0.01;
    sys.C1 = 4.0;
    sys.validate();
    return sys;
}

}  // namespace rdlab

#pragma once

#include <optional>

#include "rdlab/regularize.hpp"
#include "rdlab/solver.hpp"

namespace rdlab {

// ---------------------------------------------------------------------------
// Order-preservation experiments.
//
// The underlying results are existential ("there exist ordered solutions"),
// so a run checks the scheme's canonical trajectories and never claims more;
// failure at large dt is recorded as dt sensitivity, not as a refutation.

struct ComparisonOptions {
    bool cone = false;                    // enforce u0 >= 0 and sample on the cone
    bool skip_domination_check = false;   // caller certified f1 >= f2 separately
    std::optional<double> certified_R0;   // cooperativity radius from a prior check
    double epsilon = 0.0;                 // relaxed-cooperativity allowance (envelope)
    std::uint64_t seed = 0x5eedULL;
};

struct ComparisonReport {
    std::string pair;
    double dt = 0.0;
    double tol = 0.0;
    std::vector<double> times;
    std::vector<double> pos_part;  // ||(u1 - u2)^+|| per recorded frame
    std::vector<double> envelope;  // Gronwall bound on the same frames
    double max_violation = 0.0;
    double required_R0 = 0.0;      // sqrt(2 max realized ||u(t)||^2)
    bool r0_covered = false;
    double fitted_C3 = 0.0;
    double dt_star = 0.0;          // 1 / (4 C3)
    bool pass = false;
    Trajectory traj1, traj2;
    std::string note;
};

struct SeriesReport {
    std::string id;
    bool pass = true;
    double worst_slack = std::numeric_limits<double>::infinity();
    double tolerance = 0.0;
    std::vector<double> times, value, bound;
    std::map<std::string, double> details;
};

namespace detail {

inline void require_ordered(const SpatialGrid& grid, const Field& lo, const Field& hi,
                            bool cone) {
    for (int c = 0; c < lo.d; ++c) {
        for (int i = 0; i < grid.node_count(); ++i) {
            if (lo.values[c][i] > hi.values[c][i])
                throw Error("comparison: initial data unordered at node " + std::to_string(i) +
                            ", component " + std::to_string(c));
            if (cone && lo.values[c][i] < 0.0)
                throw Error("comparison: negative initial data at node " + std::to_string(i) +
                            ", component " + std::to_string(c) + " with cone enforcement");
        }
    }
}

inline double max_l2(const Trajectory& t) {
    double m = 0.0;
    for (double v : t.l2_sq) m = std::max(m, v);
    return m;
}

}  // namespace detail

// Gronwall envelope diagnostic: g(t) = ||(u1-u2)^+||^2 must stay below
// (g(tau) + |Omega| eps^2 (t - tau)) exp((2 C3 + 1)(t - tau)) within the
// discretization allowance.
inline SeriesReport gronwall_diagnostic(const SpatialGrid& grid, const Trajectory& t1,
                                        const Trajectory& t2, double C3, double epsilon) {
    require(t1.times.size() == t2.times.size(), "gronwall_diagnostic: trajectories must share times");
    SeriesReport rep;
    rep.id = "gronwall";
    rep.tolerance = discretization_allowance(grid, t1.dt);
    const double tau = t1.times.front();
    const double K = grid.measure();
    double g0 = sq(positive_part_norm(grid, t1.frames.front(), t2.frames.front()));
    for (std::size_t k = 0; k < t1.times.size(); ++k) {
        require(t1.times[k] == t2.times[k], "gronwall_diagnostic: time mismatch");
        const double t = t1.times[k];
        const double g = sq(positive_part_norm(grid, t1.frames[k], t2.frames[k]));
        const double env =
            (g0 + K * epsilon * epsilon * (t - tau)) * std::exp((2.0 * C3 + 1.0) * (t - tau));
        rep.times.push_back(t);
        rep.value.push_back(g);
        rep.bound.push_back(env);
        rep.worst_slack = std::min(rep.worst_slack, env + rep.tolerance - g);
    }
    rep.pass = rep.worst_slack >= 0.0;
    rep.details["C3"] = C3;
    rep.details["epsilon"] = epsilon;
    rep.details["K"] = K;
    return rep;
}

// Proof-shaped constant for the relaxed comparison bound
// ||(u1-u2)^+|| <= C(tau,T) * epsilon: with ordered initial data the Gronwall
// envelope gives C^2 = |Omega| (T - tau) exp((2 C3 + 1)(T - tau)).
inline double gronwall_constant(const SpatialGrid& grid, double tau, double T, double C3) {
    return std::sqrt(grid.measure() * (T - tau) * std::exp((2.0 * C3 + 1.0) * (T - tau)));
}

inline ComparisonReport run_comparison(const SpatialGrid& grid, const ReactionSystem& sys1,
                                       const ReactionSystem& sys2, const Field& u01,
                                       const Field& u02, const SolveConfig& cfg,
                                       const ComparisonOptions& opt = {}) {
    detail::require_ordered(grid, u01, u02, opt.cone);
    if (!opt.skip_domination_check) {
        SamplePlan plan = make_plan(sys1, 1.0, opt.seed);
        plan.positive_cone = plan.positive_cone || opt.cone;
        auto dom = dominates(sys1, sys2, plan);
        if (dom.verdict == Verdict::Fail)
            throw Error("run_comparison: domination of '" + sys2.name + "' by '" + sys1.name +
                        "' failed on samples; pass skip_domination_check to override");
    }

    ComparisonReport rep;
    rep.pair = sys1.name + " vs " + sys2.name;
    rep.traj1 = integrate(grid, sys1, u01, cfg);
    rep.traj2 = integrate(grid, sys2, u02, cfg);
    rep.dt = rep.traj1.dt;

    // comparison-system one-sided Lipschitz constant on the realized range
    double reach = 1.0 + field_norm_linf(u02);
    for (const auto& f : rep.traj1.frames) reach = std::max(reach, field_norm_linf(f));
    for (const auto& f : rep.traj2.frames) reach = std::max(reach, field_norm_linf(f));
    SamplePlan c3plan = make_plan(sys2, reach + 1.0, opt.seed);
    c3plan.per_ball = 128;
    c3plan.positive_cone = c3plan.positive_cone || opt.cone;
    rep.fitted_C3 = check_one_sided_lipschitz(sys2, c3plan).constants.at("fitted_C3");
    rep.dt_star = 0.25 / std::max(rep.fitted_C3, 1e-12);

    double max_frame_l2 = 0.0;
    for (std::size_t k = 0; k < rep.traj1.times.size(); ++k) {
        const double v = positive_part_norm(grid, rep.traj1.frames[k], rep.traj2.frames[k]);
        rep.times.push_back(rep.traj1.times[k]);
        rep.pos_part.push_back(v);
        rep.max_violation = std::max(rep.max_violation, v);
        max_frame_l2 = std::max(max_frame_l2, std::sqrt(rep.traj2.l2_sq[k]));
    }
    rep.tol = std::max(1e-6 * (1.0 + max_frame_l2), 1e-10);
    rep.pass = rep.max_violation <= rep.tol;

    rep.required_R0 =
        std::sqrt(2.0 * std::max(detail::max_l2(rep.traj1), detail::max_l2(rep.traj2)));
    rep.r0_covered = opt.certified_R0.has_value() && *opt.certified_R0 >= rep.required_R0;
    if (!opt.certified_R0.has_value()) rep.note = "cooperativity radius not certified by caller";

    auto gron = gronwall_diagnostic(grid, rep.traj1, rep.traj2, rep.fitted_C3, opt.epsilon);
    rep.envelope = gron.bound;
    for (double& e : rep.envelope) e = std::sqrt(std::max(0.0, e));
    return rep;
}

struct ShiftedComparisonReport {
    ComparisonReport shifted;        // in the transformed variables
    ComparisonReport back_mapped;    // frames mapped by u = e^{beta t} v
    double beta = 0.0;
    bool verdicts_agree = false;
};

inline ShiftedComparisonReport run_shifted_comparison(const SpatialGrid& grid,
                                                      const ReactionSystem& sys1,
                                                      const ReactionSystem& sys2, double beta,
                                                      const Field& u01, const Field& u02,
                                                      const SolveConfig& cfg,
                                                      const ComparisonOptions& opt = {}) {
    require(beta == 0.0 || beta > -std::min(sys1.alpha, sys2.alpha),
            "run_shifted_comparison: beta must exceed -min(alpha1, alpha2)");
    ShiftedComparisonReport out;
    out.beta = beta;

    auto s1 = exp_shift(sys1, beta);
    auto s2 = exp_shift(sys2, beta);
    const double scale0 = std::exp(-beta * cfg.tau);
    Field v01 = u01, v02 = u02;
    for (auto& comp : v01.values)
        for (double& v : comp) v *= scale0;
    for (auto& comp : v02.values)
        for (double& v : comp) v *= scale0;

    out.shifted = run_comparison(grid, s1.system, s2.system, v01, v02, cfg, opt);

    // map the trajectories back and re-evaluate the ordering in the original
    // variables; e^{beta t} > 0 preserves the sign of every difference
    out.back_mapped = out.shifted;
    out.back_mapped.pair = sys1.name + " vs " + sys2.name + " (back-mapped)";
    auto map_traj = [&](Trajectory& traj) {
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const double c = std::exp(beta * traj.times[k]);
            for (auto& comp : traj.frames[k].values)
                for (double& v : comp) v *= c;
            traj.l2_sq[k] *= c * c;
        }
    };
    map_traj(out.back_mapped.traj1);
    map_traj(out.back_mapped.traj2);
    out.back_mapped.max_violation = 0.0;
    double max_frame_l2 = 0.0;
    for (std::size_t k = 0; k < out.back_mapped.times.size(); ++k) {
        const double v = positive_part_norm(grid, out.back_mapped.traj1.frames[k],
                                            out.back_mapped.traj2.frames[k]);
        out.back_mapped.pos_part[k] = v;
        out.back_mapped.max_violation = std::max(out.back_mapped.max_violation, v);
        max_frame_l2 = std::max(max_frame_l2, std::sqrt(out.back_mapped.traj2.l2_sq[k]));
    }
    out.back_mapped.tol = std::max(1e-6 * (1.0 + max_frame_l2), 1e-10);
    out.back_mapped.pass = out.back_mapped.max_violation <= out.back_mapped.tol;
    out.verdicts_agree = out.shifted.pass == out.back_mapped.pass;
    return out;
}

// Per-frame bounds 0 <= u^i(t,x) <= e^{a_i (t-tau)} sup u0^i, plus the
// aggregate sup bound with a = max a_i.
inline SeriesReport check_max_principle(const SpatialGrid&, const Trajectory& traj,
                                        const std::vector<double>& a, double tol = 1e-6,
                                        double floor_tol = 1e-8) {
    SeriesReport rep;
    rep.id = "max_principle";
    rep.tolerance = tol;
    const auto& u0 = traj.frames.front();
    require(u0.d == static_cast<int>(a.size()), "check_max_principle: rate count mismatch");
    std::vector<double> sup0(u0.d, 0.0);
    for (int c = 0; c < u0.d; ++c)
        for (double v : u0.values[c]) sup0[c] = std::max(sup0[c], v);
    const double a_max = *std::max_element(a.begin(), a.end());
    const double tau = traj.times.front();
    double min_val = std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k] - tau;
        double frame_sup = 0.0, frame_bound = 0.0;
        for (int c = 0; c < u0.d; ++c) {
            const double bound = std::exp(a[c] * t) * sup0[c];
            for (double v : traj.frames[k].values[c]) {
                rep.worst_slack = std::min(rep.worst_slack, bound + tol - v);
                min_val = std::min(min_val, v);
                frame_sup = std::max(frame_sup, v);
            }
            frame_bound = std::max(frame_bound, bound);
        }
        rep.times.push_back(traj.times[k]);
        rep.value.push_back(frame_sup);
        rep.bound.push_back(std::exp(a_max * t) * field_norm_linf(u0));
        require(frame_bound <= rep.bound.back() + 1e-12,
                "check_max_principle: aggregate bound must dominate per-component bounds");
    }
    rep.details["min_value"] = std::min(min_val, traj.min_value);
    rep.details["floor"] = -floor_tol;
    rep.pass = rep.worst_slack >= 0.0 && rep.details["min_value"] >= -floor_tol;
    return rep;
}

// Pointwise domination of one trajectory by another plus the smoothing-decay
// envelope: fits the smallest C with ||u(t)||_inf <= C t^{-3/4}
// e^{(a - D lambda1) t} ||u0||_{L2} on t in [t_min, T]. The constant is
// existential, so only finiteness and the decay shape are asserted.
inline SeriesReport check_linf_domination(const SpatialGrid& grid, const Trajectory& traj_lv,
                                          const Trajectory& traj_lin, double lambda1, double a,
                                          double D, double tol = 1e-6) {
    require(traj_lv.times.size() == traj_lin.times.size(),
            "check_linf_domination: trajectories must share times");
    SeriesReport rep;
    rep.id = "linf_domination";
    rep.tolerance = tol;
    double dom_worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj_lv.times.size(); ++k) {
        for (int c = 0; c < traj_lv.frames[k].d; ++c)
            for (int i = 0; i < grid.node_count(); ++i)
                dom_worst = std::min(dom_worst, tol + traj_lin.frames[k].values[c][i] -
                                                    traj_lv.frames[k].values[c][i]);
    }
    const double tau = traj_lv.times.front();
    const double t_min = tau + 5.0 * traj_lv.dt;
    Field u0 = traj_lv.frames.front();
    const double u0_l2 = field_norm_l2(grid, u0);
    double c_hat = 0.0;
    double first_sup = -1.0, last_sup = 0.0;
    for (std::size_t k = 0; k < traj_lv.times.size(); ++k) {
        const double t = traj_lv.times[k] - tau;
        const double sup = field_norm_linf(traj_lv.frames[k]);
        rep.times.push_back(traj_lv.times[k]);
        rep.value.push_back(sup);
        if (t < t_min - tau || t <= 0.0) {
            rep.bound.push_back(sup);
            continue;
        }
        const double envelope = std::pow(t, -0.75) * std::exp((a - D * lambda1) * t) * u0_l2;
        c_hat = std::max(c_hat, sup / envelope);
        rep.bound.push_back(envelope);
        if (first_sup < 0.0) first_sup = sup;
        last_sup = sup;
    }
    rep.details["C_hat"] = c_hat;
    rep.details["domination_worst_slack"] = dom_worst;
    rep.details["sup_at_tmin"] = first_sup;
    rep.details["sup_at_T"] = last_sup;
    rep.worst_slack = dom_worst;
    const bool decays = first_sup <= 0.0 || last_sup < first_sup;
    rep.pass = dom_worst >= 0.0 && std::isfinite(c_hat) && decays;
    return rep;
}

// ---------------------------------------------------------------------------
// Regularization convergence study: for each k build the smoothed system,
// integrate from the same initial data, and record the deviation from the
// base nonlinearity together with the trajectory distance to the finest k.
struct StudyRow {
    double k = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;     // sup |f^k - f_k| on |u| <= k+2
    double sup_dev = 0.0;   // sup |f^k - f| on |u| <= A
    double traj_dist = 0.0; // max_t || u^k(t) - u^ref(t) ||_{L2}
    double D1 = 0.0, D2 = 0.0, gamma = 0.0, D3 = 0.0;
};

inline std::vector<StudyRow> regularization_convergence_study(
    const SpatialGrid& grid, const ReactionSystem& sys, const std::vector<double>& ks, double A,
    const Field& u0, const SolveConfig& cfg, TailVariant tail = TailVariant::Plain,
    int quad_order = 8, const ProbeLattice& probe = {}) {
    require(!ks.empty(), "study: need at least one k");
    for (std::size_t i = 1; i < ks.size(); ++i)
        require(ks[i] > ks[i - 1], "study: ks must be increasing");

    std::vector<StudyRow> rows;
    std::vector<Trajectory> trajs;
    for (double k : ks) {
        auto built = build_smoothed(sys, k, tail, quad_order, probe);
        StudyRow row;
        row.k = k;
        row.epsilon = built.epsilon;
        // deviation from the unsmoothed truncation, the computed stand-in for
        // the mollification error bound
        auto trunc = truncate(sys, k, tail);
        row.delta = sup_deviation(trunc.system, built.reg.system, k + 2.0,
                                  built.epsilon * 0.5, probe);
        row.sup_dev = sup_deviation(sys, built.reg.system, A, built.epsilon * 0.5, probe);
        auto rep = check_aux_bounds(built.reg.system, make_plan(built.reg.system), sys.C2);
        row.D1 = rep.constants.at("D1");
        row.D2 = rep.constants.at("D2");
        row.gamma = rep.constants.at("gamma");
        row.D3 = rep.constants.at("D3");
        trajs.push_back(integrate(grid, built.reg.system, u0, cfg));
        rows.push_back(row);
    }
    const Trajectory& ref = trajs.back();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double dist = 0.0;
        for (std::size_t f = 0; f < ref.times.size(); ++f) {
            Field diff = trajs[r].frames[f];
            for (int c = 0; c < diff.d; ++c)
                for (int i = 0; i < grid.node_count(); ++i)
                    diff.values[c][i] -= ref.frames[f].values[c][i];
            dist = std::max(dist, field_norm_l2(grid, diff));
        }
        rows[r].traj_dist = dist;
    }
    return rows;
}

}  // namespace rdlab

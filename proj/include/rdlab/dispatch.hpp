#pragma once

#include <future>
#include <iostream>

#include "rdlab/config.hpp"
#include "rdlab/csv.hpp"

namespace rdlab {

// Exit status contract: 0 = all verdicts pass, 1 = some verdict failed,
// 2 = execution error (blow-up, bad config, precondition violation). The
// caller maps exceptions to 2.
struct DispatchResult {
    int status = 0;
    std::vector<std::string> artifacts;
    std::string summary;
};

namespace detail {

inline void note_artifact(DispatchResult& res, const std::filesystem::path& p) {
    res.artifacts.push_back(p.string());
}

inline std::vector<ConditionReport> run_condition_suite(const Setup& setup, std::uint64_t seed) {
    std::vector<ConditionReport> reps;
    const auto& sys = setup.model;
    auto plan = make_plan(sys, setup.coop_r0, seed);
    plan.x_points.clear();
    const int stride = std::max(1, setup.grid.node_count() / 32);
    for (int i = 0; i < setup.grid.node_count(); i += stride) {
        auto x = setup.grid.node_pos(i);
        plan.x_points.push_back(std::vector<double>(x.begin(), x.begin() + setup.grid.dim));
    }
    reps.push_back(check_growth(sys, plan));
    reps.push_back(check_dissipation(sys, plan));
    reps.push_back(check_one_sided_lipschitz(sys, plan));
    reps.push_back(check_cooperative(sys, setup.coop_r0, 0.0, plan));
    reps.push_back(check_positivity_compat(sys, plan));
    if (setup.model2) {
        auto plan2 = plan;
        plan2.positive_cone = plan.positive_cone || setup.model2->positive_cone_only;
        reps.push_back(dominates(sys, *setup.model2, plan2));
    }
    auto est = estimate_growth_exponents(sys);
    ConditionReport exps;
    exps.condition = "growth_exponents";
    exps.verdict = Verdict::PassWithConstant;
    exps.seed = seed;
    for (int i = 0; i < sys.d; ++i)
        exps.constants["p_" + std::to_string(i + 1)] = est[i];
    reps.push_back(exps);
    return reps;
}

}  // namespace detail

inline DispatchResult dispatch(Setup& setup, const std::filesystem::path& out_dir,
                               std::uint64_t seed = 0x5eedULL, int jobs = 1) {
    DispatchResult res;
    std::filesystem::create_directories(out_dir);

    if (setup.experiment == "eig") {
        auto out = open_csv(out_dir / "eig.csv");
        out << "lambda1\n" << fmt17(principal_eigenvalue(setup.grid)) << '\n';
        detail::note_artifact(res, out_dir / "eig.csv");
        res.summary = "lambda1 = " + fmt17(principal_eigenvalue(setup.grid));
        return res;
    }

    if (setup.experiment == "simulate") {
        auto traj = integrate(setup.grid, setup.model, setup.initial, setup.solve);
        write_trajectory_csv(out_dir / "trajectory.csv", setup.grid, traj);
        write_energy_csv(out_dir / "energy.csv", traj, setup.model.d);
        detail::note_artifact(res, out_dir / "trajectory.csv");
        detail::note_artifact(res, out_dir / "energy.csv");
        if (setup.emit_plots)
            write_plot_script(out_dir, "energy", "energy.csv", "energy",
                              {{2, "l2_sq"}, {3, "cum_grad"}});
        res.summary = "simulated " + setup.model.name + ", min value " + fmt17(traj.min_value);
        return res;
    }

    if (setup.experiment == "compare" || setup.experiment == "compare-shifted") {
        require(setup.model2.has_value(), "dispatch: model2 required for experiment=compare");
        ComparisonOptions opt;
        opt.cone = setup.model.positive_cone_only || setup.model2->positive_cone_only;
        opt.seed = seed;
        if (setup.experiment == "compare") {
            auto rep = run_comparison(setup.grid, setup.model, *setup.model2, setup.initial,
                                      setup.initial2, setup.solve, opt);
            write_comparison_csv(out_dir / "comparison.csv", rep);
            detail::note_artifact(res, out_dir / "comparison.csv");
            if (setup.emit_plots)
                write_plot_script(out_dir, "comparison", "comparison.csv", "positive part norm",
                                  {{2, "violation"}, {3, "envelope"}});
            res.status = rep.pass ? 0 : 1;
            res.summary = rep.pair + ": max violation " + fmt17(rep.max_violation) +
                          (rep.pass ? " (pass)" : " (fail)");
        } else {
            auto rep = run_shifted_comparison(setup.grid, setup.model, *setup.model2, setup.beta,
                                              setup.initial, setup.initial2, setup.solve, opt);
            write_comparison_csv(out_dir / "comparison.csv", rep.back_mapped);
            write_comparison_csv(out_dir / "comparison_shifted.csv", rep.shifted);
            detail::note_artifact(res, out_dir / "comparison.csv");
            detail::note_artifact(res, out_dir / "comparison_shifted.csv");
            res.status = rep.shifted.pass && rep.verdicts_agree ? 0 : 1;
            res.summary = rep.shifted.pair + ": max violation " +
                          fmt17(rep.shifted.max_violation) +
                          (res.status == 0 ? " (pass)" : " (fail)");
        }
        return res;
    }

    if (setup.experiment == "check-conditions") {
        auto reps = detail::run_condition_suite(setup, seed);
        write_conditions_csv(out_dir / "conditions.csv", reps);
        write_conditions_text(out_dir / "report.txt", reps);
        detail::note_artifact(res, out_dir / "conditions.csv");
        detail::note_artifact(res, out_dir / "report.txt");
        int fails = 0;
        for (const auto& r : reps)
            if (r.verdict == Verdict::Fail) ++fails;
        res.status = fails == 0 ? 0 : 1;
        res.summary = std::to_string(reps.size() - fails) + "/" + std::to_string(reps.size()) +
                      " conditions passed for " + setup.model.name;
        return res;
    }

    if (setup.experiment == "regularize") {
        std::vector<StudyRow> rows;
        std::vector<Trajectory> trajs(setup.ks.size());
        std::vector<StudyRow> parallel_rows(setup.ks.size());
        auto run_one = [&](std::size_t idx) {
            const double k = setup.ks[idx];
            auto built = build_smoothed(setup.model, k, setup.tail, setup.quad_order);
            StudyRow row;
            row.k = k;
            row.epsilon = built.epsilon;
            auto trunc = truncate(setup.model, k, setup.tail);
            row.delta = sup_deviation(trunc.system, built.reg.system, k + 2.0,
                                      built.epsilon * 0.5);
            row.sup_dev =
                sup_deviation(setup.model, built.reg.system, setup.radius, built.epsilon * 0.5);
            auto rep = check_aux_bounds(built.reg.system, make_plan(built.reg.system, 2.0, seed),
                                        setup.model.C2);
            row.D1 = rep.constants.at("D1");
            row.D2 = rep.constants.at("D2");
            row.gamma = rep.constants.at("gamma");
            row.D3 = rep.constants.at("D3");
            parallel_rows[idx] = row;
            trajs[idx] = integrate(setup.grid, built.reg.system, setup.initial, setup.solve);
        };
        if (jobs > 1) {
            std::vector<std::future<void>> futs;
            for (std::size_t i = 0; i < setup.ks.size(); ++i)
                futs.push_back(std::async(std::launch::async, run_one, i));
            for (auto& f : futs) f.get();
        } else {
            for (std::size_t i = 0; i < setup.ks.size(); ++i) run_one(i);
        }
        for (std::size_t i = 0; i < setup.ks.size(); ++i) {
            double dist = 0.0;
            const Trajectory& ref = trajs.back();
            for (std::size_t f = 0; f < ref.times.size(); ++f) {
                Field diff = trajs[i].frames[f];
                for (int c = 0; c < diff.d; ++c)
                    for (int n = 0; n < setup.grid.node_count(); ++n)
                        diff.values[c][n] -= ref.frames[f].values[c][n];
                dist = std::max(dist, field_norm_l2(setup.grid, diff));
            }
            parallel_rows[i].traj_dist = dist;
            rows.push_back(parallel_rows[i]);
        }
        write_regularize_csv(out_dir / "regularize.csv", rows);
        write_study_csv(out_dir / "study.csv", rows);
        detail::note_artifact(res, out_dir / "regularize.csv");
        detail::note_artifact(res, out_dir / "study.csv");
        if (setup.emit_plots)
            write_plot_script(out_dir, "study", "study.csv", "deviation",
                              {{3, "sup_deviation"}, {4, "traj_distance"}});
        bool ok = true;
        for (const auto& r : rows) ok = ok && r.gamma > 0.0;
        res.status = ok ? 0 : 1;
        res.summary = "regularized " + setup.model.name + " at " +
                      std::to_string(setup.ks.size()) + " cutoffs";
        return res;
    }

    if (setup.experiment == "maxprinciple") {
        auto traj = integrate(setup.grid, setup.model, setup.initial, setup.solve);
        auto rep = check_max_principle(setup.grid, traj, setup.rates);
        write_series_csv(out_dir / "maxprinciple.csv", rep);
        detail::note_artifact(res, out_dir / "maxprinciple.csv");
        res.status = rep.pass ? 0 : 1;
        res.summary = "max principle worst slack " + fmt17(rep.worst_slack) +
                      (rep.pass ? " (pass)" : " (fail)");
        return res;
    }

    if (setup.experiment == "linf") {
        require(setup.model2.has_value(), "dispatch: model2 required for experiment=linf");
        auto t1 = integrate(setup.grid, setup.model, setup.initial, setup.solve);
        auto t2 = integrate(setup.grid, *setup.model2, setup.initial, setup.solve);
        const double a = *std::max_element(setup.rates2.begin(), setup.rates2.end());
        const double D =
            *std::min_element(setup.model2->diffusion.begin(), setup.model2->diffusion.end());
        auto rep = check_linf_domination(setup.grid, t1, t2, principal_eigenvalue(setup.grid), a, D);
        write_series_csv(out_dir / "linf.csv", rep);
        detail::note_artifact(res, out_dir / "linf.csv");
        res.status = rep.pass ? 0 : 1;
        res.summary = "sup-norm domination fitted C " + fmt17(rep.details.at("C_hat")) +
                      (rep.pass ? " (pass)" : " (fail)");
        return res;
    }

    throw Error("dispatch: unknown experiment '" + setup.experiment + "'");
}

}  // namespace rdlab

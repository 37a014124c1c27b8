#pragma once

#include <filesystem>
#include <fstream>

#include "rdlab/harness.hpp"

namespace rdlab {

// All numbers are written with 17 significant digits so repeated runs of the
// same config produce byte-identical files.

inline std::ofstream open_csv(const std::filesystem::path& path) {
    if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    require(out.good(), "csv: cannot open '" + path.string() + "' for writing");
    return out;
}

inline void write_trajectory_csv(const std::filesystem::path& path, const SpatialGrid& grid,
                                 const Trajectory& traj) {
    auto out = open_csv(path);
    out << (grid.dim == 1 ? "t,node_index,x,component,value\n"
                          : "t,node_index,x,y,component,value\n");
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        for (int i = 0; i < grid.node_count(); ++i) {
            auto x = grid.node_pos(i);
            for (int c = 0; c < traj.frames[k].d; ++c) {
                out << fmt17(traj.times[k]) << ',' << i << ',' << fmt17(x[0]);
                if (grid.dim == 2) out << ',' << fmt17(x[1]);
                out << ',' << c << ',' << fmt17(traj.frames[k].values[c][i]) << '\n';
            }
        }
    }
}

inline void write_energy_csv(const std::filesystem::path& path, const Trajectory& traj, int d) {
    auto out = open_csv(path);
    out << "t,l2_sq,cum_grad";
    for (int c = 1; c <= d; ++c) out << ",cum_lp_" << c;
    out << ",cum_forcing\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << fmt17(traj.times[k]) << ',' << fmt17(traj.l2_sq[k]) << ','
            << fmt17(traj.cum_grad[k]);
        for (int c = 0; c < d; ++c) out << ',' << fmt17(traj.cum_lp[k][c]);
        out << ',' << fmt17(traj.cum_forcing[k]) << '\n';
    }
}

inline void write_comparison_csv(const std::filesystem::path& path, const ComparisonReport& rep) {
    auto out = open_csv(path);
    out << "# ordering verified for the scheme's canonical trajectories; other weak solutions\n"
           "# of the same data may differ when uniqueness fails\n";
    out << "t,positive_part_norm,envelope,violation_flag\n";
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        out << fmt17(rep.times[k]) << ',' << fmt17(rep.pos_part[k]) << ','
            << fmt17(rep.envelope[k]) << ',' << (rep.pos_part[k] > rep.tol ? 1 : 0) << '\n';
    }
}

inline void write_series_csv(const std::filesystem::path& path, const SeriesReport& rep) {
    auto out = open_csv(path);
    out << "t,value,bound,violation_flag\n";
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        out << fmt17(rep.times[k]) << ',' << fmt17(rep.value[k]) << ',' << fmt17(rep.bound[k])
            << ',' << (rep.value[k] > rep.bound[k] + rep.tolerance ? 1 : 0) << '\n';
    }
}

inline void write_regularize_csv(const std::filesystem::path& path,
                                 const std::vector<StudyRow>& rows) {
    auto out = open_csv(path);
    out << "k,epsilon_k,delta_nk,sup_deviation,D1,D2,gamma,D3\n";
    for (const auto& r : rows) {
        out << fmt17(r.k) << ',' << fmt17(r.epsilon) << ',' << fmt17(r.delta) << ','
            << fmt17(r.sup_dev) << ',' << fmt17(r.D1) << ',' << fmt17(r.D2) << ','
            << fmt17(r.gamma) << ',' << fmt17(r.D3) << '\n';
    }
}

inline void write_study_csv(const std::filesystem::path& path, const std::vector<StudyRow>& rows) {
    auto out = open_csv(path);
    out << "k,epsilon_k,sup_deviation,traj_distance\n";
    for (const auto& r : rows)
        out << fmt17(r.k) << ',' << fmt17(r.epsilon) << ',' << fmt17(r.sup_dev) << ','
            << fmt17(r.traj_dist) << '\n';
}

inline void write_conditions_csv(const std::filesystem::path& path,
                                 const std::vector<ConditionReport>& reps) {
    auto out = open_csv(path);
    out << "condition,verdict,constant,value,witness_t,witness_u,margin\n";
    for (const auto& rep : reps) {
        std::string wu;
        for (std::size_t i = 0; i < rep.witness.u.size(); ++i)
            wu += (i ? ";" : "") + fmt17(rep.witness.u[i]);
        if (rep.constants.empty()) {
            out << rep.condition << ',' << to_string(rep.verdict) << ",,," << fmt17(rep.witness.t)
                << ',' << wu << ',' << fmt17(rep.witness.margin) << '\n';
            continue;
        }
        for (const auto& [name, value] : rep.constants) {
            out << rep.condition << ',' << to_string(rep.verdict) << ',' << name << ','
                << fmt17(value) << ',' << fmt17(rep.witness.t) << ',' << wu << ','
                << fmt17(rep.witness.margin) << '\n';
        }
    }
}

inline void write_conditions_text(const std::filesystem::path& path,
                                  const std::vector<ConditionReport>& reps) {
    auto out = open_csv(path);
    out << "# sampled certificates: pass means the condition held on the listed samples,\n"
           "# never that it was proved\n";
    for (const auto& rep : reps) {
        out << rep.condition << ": " << to_string(rep.verdict) << " on "
            << rep.sample_count << " samples (seed " << rep.seed << ")\n";
        for (const auto& [name, value] : rep.constants)
            out << "  " << name << " = " << fmt17(value) << '\n';
        if (!rep.witness.u.empty()) {
            out << "  witness: t = " << fmt17(rep.witness.t) << ", u = (";
            for (std::size_t i = 0; i < rep.witness.u.size(); ++i)
                out << (i ? ", " : "") << fmt17(rep.witness.u[i]);
            out << "), margin = " << fmt17(rep.witness.margin) << '\n';
        }
        if (!rep.witness.v.empty()) {
            out << "  witness v = (";
            for (std::size_t i = 0; i < rep.witness.v.size(); ++i)
                out << (i ? ", " : "") << fmt17(rep.witness.v[i]);
            out << ")\n";
        }
        if (!rep.note.empty()) out << "  note: " << rep.note << '\n';
    }
}

// Gnuplot companions: scripts plus data files, never binary images, so runs
// stay headless and outputs diff cleanly.
inline void write_plot_script(const std::filesystem::path& dir, const std::string& name,
                              const std::string& csv, const std::string& ylabel,
                              const std::vector<std::pair<int, std::string>>& columns) {
    auto out = open_csv(dir / (name + ".gp"));
    out << "set datafile separator ','\n";
    out << "set key autotitle columnhead\n";
    out << "set xlabel 't'\n";
    out << "set ylabel '" << ylabel << "'\n";
    out << "set terminal svg size 900,600\n";
    out << "set output '" << name << ".svg'\n";
    out << "plot ";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out << ", ";
        out << "'" << csv << "' using 1:" << columns[i].first << " with lines title '"
            << columns[i].second << "'";
    }
    out << '\n';
}

}  // namespace rdlab

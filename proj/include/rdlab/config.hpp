#pragma once

#include <fstream>
#include <set>

#include "rdlab/grid.hpp"
#include "rdlab/models.hpp"
#include "rdlab/regularize.hpp"
#include "rdlab/solver.hpp"

namespace rdlab {

// Line-oriented config: `section.key = value`, '#' comments, comma lists.
// Typed getters mark keys as consumed so anything left over is reported as an
// unknown key instead of being silently ignored.
class RunConfig {
public:
    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        require(in.good(), "config: cannot open '" + path + "'");
        return parse(in);
    }

    static RunConfig from_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    static RunConfig parse(std::istream& in) {
        RunConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (trim(line).empty()) continue;
            const auto eq = line.find('=');
            require(eq != std::string::npos,
                    "config: line " + std::to_string(lineno) + " is not 'section.key = value'");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            require(key.find('.') != std::string::npos,
                    "config: key '" + key + "' must be section.key");
            require(!cfg.kv_.count(key), "config: duplicate key '" + key + "'");
            cfg.kv_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_string(const std::string& key) {
        auto it = kv_.find(key);
        require(it != kv_.end(), "config: missing key '" + key + "'");
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) {
        return has(key) ? get_string(key) : fallback;
    }

    double get_double(const std::string& key) {
        const std::string s = get_string(key);
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            require(pos == s.size(), "trailing characters");
            return v;
        } catch (const std::exception&) {
            throw Error("config: key '" + key + "' is not a number: '" + s + "'");
        }
    }

    double get_double(const std::string& key, double fallback) {
        return has(key) ? get_double(key) : fallback;
    }

    long get_int(const std::string& key) {
        const double v = get_double(key);
        require(v == std::floor(v), "config: key '" + key + "' must be an integer");
        return static_cast<long>(v);
    }

    long get_int(const std::string& key, long fallback) {
        return has(key) ? get_int(key) : fallback;
    }

    bool get_bool(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const std::string s = get_string(key);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw Error("config: key '" + key + "' must be a boolean, got '" + s + "'");
    }

    std::vector<double> get_list(const std::string& key) {
        const std::string s = get_string(key);
        std::vector<double> out;
        std::size_t start = 0;
        while (start <= s.size()) {
            auto comma = s.find(',', start);
            const std::string item =
                trim(comma == std::string::npos ? s.substr(start) : s.substr(start, comma - start));
            require(!item.empty(), "config: empty list item in '" + key + "'");
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw Error("config: bad number '" + item + "' in '" + key + "'");
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    std::vector<double> get_list(const std::string& key, std::vector<double> fallback) {
        return has(key) ? get_list(key) : fallback;
    }

    // Grammar check: every present key must belong to the known vocabulary,
    // whether or not the selected experiment reads it. Typos never pass
    // silently; valid sections an experiment ignores do.
    void check_known() const {
        static const std::set<std::string> model_keys = {"name",      "a", "coupling",
                                                         "diffusion", "k", "m",
                                                         "r",         "q"};
        static const std::set<std::string> known = {
            "grid.lengths",      "grid.n_cells",          "grid.bc",
            "time.tau",          "time.T",                "time.dt",
            "time.scheme",       "time.record_stride",
            "initial.kind",      "initial.values",        "initial.path",
            "initial2.kind",     "initial2.values",       "initial2.path",
            "experiment.kind",   "experiment.beta",       "experiment.ks",
            "experiment.radius", "experiment.tail",       "experiment.quad_order",
            "experiment.r0",     "output.dir",            "output.emit_plots"};
        for (const auto& [key, value] : kv_) {
            if (known.count(key)) continue;
            const auto dot = key.find('.');
            const std::string sec = key.substr(0, dot);
            if ((sec == "model" || sec == "model2") && model_keys.count(key.substr(dot + 1)))
                continue;
            throw Error("config: unknown key '" + key + "'");
        }
    }

private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    std::map<std::string, std::string> kv_;
};

// ---------------------------------------------------------------------------
// Materialized experiment setup.

struct Setup {
    SpatialGrid grid;
    SolveConfig solve;
    ReactionSystem model;
    std::optional<ReactionSystem> model2;
    Field initial;
    Field initial2;  // second problem's data, for comparison experiments
    std::string experiment;
    double beta = 0.0;
    std::vector<double> ks;
    double radius = 3.0;
    TailVariant tail = TailVariant::Plain;
    int quad_order = 8;
    double coop_r0 = 2.0;
    std::vector<double> rates;   // a_i of the primary model, for bound checks
    std::vector<double> rates2;  // a_i of the comparison model
    bool emit_plots = false;
};

namespace detail {

inline Bc parse_bc(const std::string& s) {
    if (s == "dirichlet") return Bc::Dirichlet;
    if (s == "neumann") return Bc::Neumann;
    throw Error("config: grid.bc must be one of {dirichlet, neumann}, got '" + s + "'");
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "backward-euler") return Scheme::BackwardEuler;
    if (s == "crank-nicolson") return Scheme::CrankNicolson;
    throw Error("config: time.scheme must be one of {backward-euler, crank-nicolson}, got '" + s +
                "'");
}

inline TailVariant parse_tail(const std::string& s) {
    if (s == "plain") return TailVariant::Plain;
    if (s == "affine") return TailVariant::Affine;
    if (s == "mixed") return TailVariant::Mixed;
    throw Error("config: experiment.tail must be one of {plain, affine, mixed}, got '" + s + "'");
}

// Model factory for a config section ("model" or "model2"). Returns the
// system plus its growth rates for the bound checks that need them.
inline std::pair<ReactionSystem, std::vector<double>> build_model(RunConfig& cfg,
                                                                  const std::string& sec) {
    const std::string name = cfg.get_string(sec + ".name");
    if (name == "lotka_volterra") {
        auto a = cfg.get_list(sec + ".a", {1.0, 1.0, 1.0});
        require(a.size() == 3, "config: " + sec + ".a needs three entries");
        const double coupling = cfg.get_double(sec + ".coupling", 1.0);
        auto D = cfg.get_list(sec + ".diffusion", {1.0, 1.0, 1.0});
        require(D.size() == 3, "config: " + sec + ".diffusion needs three entries");
        auto sys = lotka_volterra(
            LVParams::constant({a[0], a[1], a[2]}, coupling, {D[0], D[1], D[2]}));
        return {sys, a};
    }
    if (name == "uncoupled_logistic" || name == "uncoupled_linear") {
        auto a = cfg.get_list(sec + ".a", {1.0, 1.0, 1.0});
        auto D = cfg.get_list(sec + ".diffusion", {1.0, 1.0, 1.0});
        require(a.size() == 3 && D.size() == 3, "config: " + sec + " needs three a and D entries");
        auto sys = name == "uncoupled_logistic"
                       ? uncoupled_logistic({a[0], a[1], a[2]}, {D[0], D[1], D[2]})
                       : uncoupled_linear({a[0], a[1], a[2]}, {D[0], D[1], D[2]});
        return {sys, a};
    }
    if (name == "autocatalysis") {
        auto sys = autocatalysis(cfg.get_double(sec + ".k", 1.0), cfg.get_double(sec + ".m", 0.5),
                                 cfg.get_double(sec + ".r", 0.5), 1.0);
        return {sys, {0.0}};
    }
    if (name == "generalized_logistic") {
        auto sys = generalized_logistic(cfg.get_double(sec + ".q", 2.0),
                                        cfg.get_double(sec + ".r", 1.0), 1.0);
        return {sys, {1.0}};
    }
    if (name == "heat") {
        const double D = cfg.get_double(sec + ".diffusion", 1.0);
        ReactionSystem sys;
        sys.d = 1;
        sys.name = "heat";
        sys.diffusion = {D};
        sys.exponents = {2.0};
        sys.sublinear = true;
        sys.alpha = 0.0;
        sys.C1 = 1.0;
        sys.C2 = 1e-9;
        sys.eval = [](double, std::span<const double>, std::span<double> out) { out[0] = 0.0; };
        sys.jac = [](double, std::span<const double>, std::span<double> J) { J[0] = 0.0; };
        return {sys, {0.0}};
    }
    if (name == "cubic") {
        ReactionSystem sys;
        sys.d = 1;
        sys.name = "cubic";
        sys.diffusion = {cfg.get_double(sec + ".diffusion", 1.0)};
        sys.exponents = {4.0};
        sys.alpha = 1.0;
        sys.C1 = 1.0;
        sys.C2 = 1e-9;
        sys.eval = [](double, std::span<const double> u, std::span<double> out) {
            out[0] = u[0] * u[0] * u[0];
        };
        sys.jac = [](double, std::span<const double> u, std::span<double> J) {
            J[0] = 3.0 * u[0] * u[0];
        };
        return {sys, {0.0}};
    }
    throw Error("config: unknown model name '" + name +
                "'; supported: lotka_volterra, uncoupled_logistic, uncoupled_linear, "
                "autocatalysis, generalized_logistic, heat, cubic");
}

inline Field build_initial(RunConfig& cfg, const SpatialGrid& grid, int d,
                           const std::string& sec = "initial") {
    const std::string kind = cfg.get_string(sec + ".kind");
    if (kind == "constant") {
        auto vals = cfg.get_list(sec + ".values");
        require(static_cast<int>(vals.size()) == d,
                "config: " + sec + ".values needs one entry per component");
        return Field::constant(grid, vals);
    }
    if (kind == "sine") {
        auto amps = cfg.get_list(sec + ".values");
        require(static_cast<int>(amps.size()) == d,
                "config: " + sec + ".values needs one entry per component");
        Field f;
        f.d = d;
        f.values.assign(d, std::vector<double>(grid.node_count()));
        for (int i = 0; i < grid.node_count(); ++i) {
            auto x = grid.node_pos(i);
            double shape = 1.0;
            for (int a = 0; a < grid.dim; ++a)
                shape *= std::sin(3.14159265358979323846 * x[a] / grid.lengths[a]);
            for (int c = 0; c < d; ++c) f.values[c][i] = amps[c] * shape;
        }
        return f;
    }
    if (kind == "file") {
        const std::string path = cfg.get_string(sec + ".path");
        std::ifstream in(path);
        require(in.good(), "config: " + sec + ".path file does not exist: '" + path + "'");
        Field f;
        f.d = d;
        f.values.assign(d, std::vector<double>(grid.node_count(), 0.0));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            int node = 0, comp = 0;
            double value = 0.0;
            if (std::sscanf(line.c_str(), "%d,%d,%lf", &node, &comp, &value) != 3)
                throw Error("config: bad initial data row '" + line + "'");
            require(node >= 0 && node < grid.node_count() && comp >= 0 && comp < d,
                    "config: initial data index out of range in '" + line + "'");
            f.values[comp][node] = value;
        }
        return f;
    }
    throw Error("config: " + sec + ".kind must be one of {constant, sine, file}, got '" + kind +
                "'");
}

}  // namespace detail

inline Setup build_setup(RunConfig& cfg, const std::string& experiment) {
    Setup s;
    s.experiment = experiment;
    cfg.check_known();
    if (cfg.has("experiment.kind"))
        require(cfg.get_string("experiment.kind") == experiment,
                "config: experiment.kind does not match the requested experiment");

    auto lengths = cfg.get_list("grid.lengths");
    auto cells_d = cfg.get_list("grid.n_cells");
    std::vector<int> cells;
    for (double c : cells_d) cells.push_back(static_cast<int>(c));
    s.grid = build_grid(lengths, cells, detail::parse_bc(cfg.get_string("grid.bc")));
    if (experiment == "eig") return s;

    s.solve.tau = cfg.get_double("time.tau", 0.0);
    s.solve.T = cfg.get_double("time.T", 1.0);
    s.solve.dt = cfg.get_double("time.dt", 1e-3);
    s.solve.scheme = detail::parse_scheme(cfg.get_string("time.scheme", "backward-euler"));
    s.solve.record_stride = static_cast<int>(cfg.get_int("time.record_stride", 1));
    s.solve.validate();

    auto [model, rates] = detail::build_model(cfg, "model");
    s.model = model;
    s.rates = rates;

    const bool needs_model2 =
        experiment == "compare" || experiment == "compare-shifted" || experiment == "linf";
    if (cfg.has("model2.name")) {
        auto [m2, r2] = detail::build_model(cfg, "model2");
        s.model2 = m2;
        s.rates2 = r2;
    } else if (needs_model2) {
        throw Error("config: model2 required for experiment=" + experiment);
    }

    if (experiment != "check-conditions" && experiment != "eig")
        s.initial = detail::build_initial(cfg, s.grid, s.model.d);
    const bool is_compare = experiment == "compare" || experiment == "compare-shifted";
    if (is_compare) {
        require(cfg.has("initial2.kind"), "config: initial2 required for experiment=" + experiment);
        s.initial2 = detail::build_initial(cfg, s.grid, s.model2->d, "initial2");
    }

    s.beta = cfg.get_double("experiment.beta", 0.0);
    s.ks = cfg.get_list("experiment.ks", {5.0, 10.0, 20.0});
    s.radius = cfg.get_double("experiment.radius", 3.0);
    s.tail = detail::parse_tail(cfg.get_string("experiment.tail", "plain"));
    s.quad_order = static_cast<int>(cfg.get_int("experiment.quad_order", 8));
    s.coop_r0 = cfg.get_double("experiment.r0", 2.0);
    s.emit_plots = cfg.get_bool("output.emit_plots", false);
    return s;
}

}  // namespace rdlab

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "rdlab/dispatch.hpp"

using namespace rdlab;

namespace {

const char* kSimulateCfg = R"(
# heat benchmark
grid.lengths = 1.0
grid.n_cells = 32
grid.bc = dirichlet
time.T = 0.05
time.dt = 1e-3
time.scheme = crank-nicolson
time.record_stride = 10
model.name = heat
initial.kind = sine
initial.values = 1.0
)";

const char* kCompareCfg = R"(
grid.lengths = 1.0
grid.n_cells = 16
grid.bc = neumann
time.T = 0.25
time.dt = 1e-3
time.scheme = backward-euler
time.record_stride = 25
model.name = lotka_volterra
model.a = 1,1,1
model.coupling = 1.0
model2.name = uncoupled_logistic
model2.a = 1,1,1
initial.kind = constant
initial.values = 0.2,0.2,0.2
initial2.kind = constant
initial2.values = 0.5,0.5,0.5
)";

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("rdlab_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("minimal simulate config parses and runs") {
    auto cfg = RunConfig::from_string(kSimulateCfg);
    auto setup = build_setup(cfg, "simulate");
    REQUIRE(setup.grid.node_count() == 32);
    REQUIRE(setup.model.name == "heat");
    auto dir = fresh_dir("simulate");
    auto res = dispatch(setup, dir);
    REQUIRE(res.status == 0);
    REQUIRE(std::filesystem::exists(dir / "trajectory.csv"));
    REQUIRE(std::filesystem::exists(dir / "energy.csv"));
}

TEST_CASE("compare config without model2 is rejected") {
    std::string text = kSimulateCfg;
    text += "initial2.kind = constant\ninitial2.values = 1.0\n";
    auto cfg = RunConfig::from_string(text);
    REQUIRE_THROWS_WITH(build_setup(cfg, "compare"),
                        Catch::Matchers::ContainsSubstring("model2 required"));
}

TEST_CASE("unsupported boundary condition lists the valid values") {
    std::string text = kSimulateCfg;
    const auto pos = text.find("grid.bc = dirichlet");
    text.replace(pos, std::string("grid.bc = dirichlet").size(), "grid.bc = periodic");
    auto cfg = RunConfig::from_string(text);
    REQUIRE_THROWS_WITH(build_setup(cfg, "simulate"),
                        Catch::Matchers::ContainsSubstring("dirichlet") &&
                            Catch::Matchers::ContainsSubstring("neumann"));
}

TEST_CASE("unknown keys are rejected") {
    std::string text = kSimulateCfg;
    text += "model.typo_key = 3\n";
    auto cfg = RunConfig::from_string(text);
    REQUIRE_THROWS_WITH(build_setup(cfg, "simulate"),
                        Catch::Matchers::ContainsSubstring("unknown key"));
}

TEST_CASE("duplicate and malformed keys are rejected") {
    REQUIRE_THROWS_WITH(RunConfig::from_string("grid.bc = neumann\ngrid.bc = dirichlet\n"),
                        Catch::Matchers::ContainsSubstring("duplicate"));
    REQUIRE_THROWS_WITH(RunConfig::from_string("justkey = 1\n"),
                        Catch::Matchers::ContainsSubstring("section.key"));
    REQUIRE_THROWS_WITH(RunConfig::from_string("grid.lengths 1\n"),
                        Catch::Matchers::ContainsSubstring("not 'section.key = value'"));
}

TEST_CASE("missing initial file is reported") {
    std::string text = kSimulateCfg;
    const auto pos = text.find("initial.kind = sine");
    text.replace(pos, std::string("initial.kind = sine").size(), "initial.kind = file");
    text += "initial.path = /nonexistent/rdlab_init.csv\n";
    auto pos2 = text.find("initial.values = 1.0");
    text.replace(pos2, std::string("initial.values = 1.0").size(), "");
    auto cfg = RunConfig::from_string(text);
    REQUIRE_THROWS_WITH(build_setup(cfg, "simulate"),
                        Catch::Matchers::ContainsSubstring("does not exist"));
}

TEST_CASE("compare experiment writes the comparison series and passes") {
    auto cfg = RunConfig::from_string(kCompareCfg);
    auto setup = build_setup(cfg, "compare");
    auto dir = fresh_dir("compare");
    auto res = dispatch(setup, dir);
    REQUIRE(res.status == 0);
    const std::string csv = slurp(dir / "comparison.csv");
    REQUIRE(csv.find("t,positive_part_norm,envelope,violation_flag") != std::string::npos);
    REQUIRE(csv.rfind("#", 0) == 0);  // report header documents the canonical-trajectory caveat
}

TEST_CASE("unordered initial data yields an execution error") {
    std::string text = kCompareCfg;
    const auto pos = text.find("initial2.values = 0.5,0.5,0.5");
    text.replace(pos, std::string("initial2.values = 0.5,0.5,0.5").size(),
                 "initial2.values = 0.1,0.1,0.1");
    auto cfg = RunConfig::from_string(text);
    auto setup = build_setup(cfg, "compare");
    auto dir = fresh_dir("compare_bad");
    REQUIRE_THROWS_WITH(dispatch(setup, dir),
                        Catch::Matchers::ContainsSubstring("unordered at node"));
}

TEST_CASE("repeated runs emit byte-identical artifacts") {
    auto cfg1 = RunConfig::from_string(kCompareCfg);
    auto setup1 = build_setup(cfg1, "compare");
    auto dir1 = fresh_dir("det1");
    dispatch(setup1, dir1, 42);
    auto cfg2 = RunConfig::from_string(kCompareCfg);
    auto setup2 = build_setup(cfg2, "compare");
    auto dir2 = fresh_dir("det2");
    dispatch(setup2, dir2, 42);
    REQUIRE(slurp(dir1 / "comparison.csv") == slurp(dir2 / "comparison.csv"));

    auto cfg3 = RunConfig::from_string(kSimulateCfg);
    auto setup3 = build_setup(cfg3, "simulate");
    auto dir3 = fresh_dir("det3");
    dispatch(setup3, dir3, 42);
    auto cfg4 = RunConfig::from_string(kSimulateCfg);
    auto setup4 = build_setup(cfg4, "simulate");
    auto dir4 = fresh_dir("det4");
    dispatch(setup4, dir4, 42);
    REQUIRE(slurp(dir3 / "trajectory.csv") == slurp(dir4 / "trajectory.csv"));
    REQUIRE(slurp(dir3 / "energy.csv") == slurp(dir4 / "energy.csv"));
}

TEST_CASE("check-conditions and eig experiments") {
    std::string text = R"(
grid.lengths = 1.0
grid.n_cells = 8
grid.bc = dirichlet
model.name = lotka_volterra
experiment.r0 = 2.0
)";
    auto cfg = RunConfig::from_string(text);
    auto setup = build_setup(cfg, "check-conditions");
    auto dir = fresh_dir("conditions");
    auto res = dispatch(setup, dir);
    REQUIRE(res.status == 1);  // the full competition system is not cooperative
    const std::string csv = slurp(dir / "conditions.csv");
    REQUIRE(csv.find("cooperative,fail") != std::string::npos);
    REQUIRE(csv.find("growth,pass") != std::string::npos);
    REQUIRE(std::filesystem::exists(dir / "report.txt"));

    auto cfg2 = RunConfig::from_string(text);
    auto setup2 = build_setup(cfg2, "eig");
    auto res2 = dispatch(setup2, fresh_dir("eig"));
    REQUIRE(res2.status == 0);
}

TEST_CASE("regularize experiment emits both tables") {
    std::string text = R"(
grid.lengths = 1.0
grid.n_cells = 8
grid.bc = neumann
time.T = 0.1
time.dt = 1e-3
time.record_stride = 20
model.name = cubic
initial.kind = constant
initial.values = 0.5
experiment.ks = 3,6
experiment.radius = 2.0
)";
    auto cfg = RunConfig::from_string(text);
    auto setup = build_setup(cfg, "regularize");
    auto dir = fresh_dir("reg");
    auto res = dispatch(setup, dir, 0x5eed, 2);
    REQUIRE(res.status == 0);
    const std::string reg = slurp(dir / "regularize.csv");
    REQUIRE(reg.find("k,epsilon_k,delta_nk,sup_deviation,D1,D2,gamma,D3") == 0);
    const std::string study = slurp(dir / "study.csv");
    REQUIRE(study.find("k,epsilon_k,sup_deviation,traj_distance") == 0);
    // two data rows each
    REQUIRE(std::count(reg.begin(), reg.end(), '\n') == 3);
    REQUIRE(std::count(study.begin(), study.end(), '\n') == 3);
}

TEST_CASE("shifted, max-principle and sup-norm dispatch arms") {
    const char* base = R"(
grid.lengths = 1.0
grid.n_cells = 16
grid.bc = dirichlet
time.T = 0.5
time.dt = 1e-3
time.scheme = backward-euler
time.record_stride = 50
model.name = lotka_volterra
model2.name = uncoupled_linear
experiment.beta = 2.0
initial.kind = constant
initial.values = 0.2,0.2,0.2
initial2.kind = constant
initial2.values = 0.5,0.5,0.5
)";
    {
        auto cfg = RunConfig::from_string(base);
        auto setup = build_setup(cfg, "compare-shifted");
        auto dir = fresh_dir("shifted");
        auto res = dispatch(setup, dir);
        REQUIRE(res.status == 0);
        REQUIRE(std::filesystem::exists(dir / "comparison.csv"));
        REQUIRE(std::filesystem::exists(dir / "comparison_shifted.csv"));
    }
    {
        auto cfg = RunConfig::from_string(base);
        auto setup = build_setup(cfg, "maxprinciple");
        auto res = dispatch(setup, fresh_dir("maxp"));
        REQUIRE(res.status == 0);
    }
    {
        auto cfg = RunConfig::from_string(base);
        auto setup = build_setup(cfg, "linf");
        auto dir = fresh_dir("linf");
        auto res = dispatch(setup, dir);
        REQUIRE(res.status == 0);
        const std::string csv = slurp(dir / "linf.csv");
        REQUIRE(csv.find("t,value,bound,violation_flag") == 0);
    }
}

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "lab/experiments.hpp"
#include "support/expect.hpp"

namespace fs = std::filesystem;
using enif::Index;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("enif-lab-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(ENIF_LAB_BINARY) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(LabConfig, ShippedConfigsParse) {
  const std::map<std::string, std::function<void(lab::ParamReader&)>> parsers{
      {"resolution_sweep", [](lab::ParamReader& r) { lab::parse_resolution_sweep(r); }},
      {"dependence_strength", [](lab::ParamReader& r) { lab::parse_dependence(r); }},
      {"localisation_sweep", [](lab::ParamReader& r) { lab::parse_localisation(r); }},
      {"lorenz96_markov_order", [](lab::ParamReader& r) { lab::parse_lorenz(r); }},
      {"grf2d_update", [](lab::ParamReader& r) { lab::parse_grf(r); }},
      {"fem_heat_demo", [](lab::ParamReader& r) { lab::parse_fem_heat(r); }},
  };
  Index count = 0;
  for (const auto& entry : fs::directory_iterator(ENIF_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const lab::Json config = lab::load_config(entry.path());
    const std::string name = config.at("experiment").get<std::string>();
    ASSERT_TRUE(parsers.contains(name)) << entry.path();
    lab::ParamReader r(config.at("params"), "params");
    parsers.at(name)(r);
    EXPECT_NO_THROW(r.finish()) << entry.path();
    EXPECT_EQ(lab::experiment_dir(config, "root"), fs::path("root") / name);
    ++count;
  }
  EXPECT_EQ(count, static_cast<Index>(lab::experiment_names().size()));
}

TEST(LabConfig, UnknownKeysAndBadTypesAreRejected) {
  lab::Sink sink;
  EXPECT_ENIF_ERROR(lab::run_experiment(lab::Json::parse(R"({"experiment": "fem_heat_demo", "sede": 3})"), sink),
                    enif::ErrorCode::parse_error);
  EXPECT_ENIF_ERROR(lab::run_experiment(lab::Json::parse(R"({"experiment": "fem_heat_demo", "params": {"nxx": 3}})"), sink),
                    enif::ErrorCode::parse_error);
  EXPECT_ENIF_ERROR(lab::run_experiment(lab::Json::parse(R"({"experiment": "fem_heat_demo", "params": {"nx": "big"}})"), sink),
                    enif::ErrorCode::parse_error);
  EXPECT_ENIF_ERROR(lab::run_experiment(lab::Json::parse(R"({"experiment": "nope"})"), sink), enif::ErrorCode::parse_error);
  EXPECT_ENIF_ERROR(lab::load_config("/nonexistent/config.json"), enif::ErrorCode::io_error);
}

TEST(LabConfig, ParamReaderFillsDefaults) {
  lab::ParamReader r(lab::Json::parse(R"({"a": 2})"), "s");
  EXPECT_EQ(r.get<int>("a", 1), 2);
  EXPECT_EQ(r.get<double>("b", 0.5), 0.5);
  EXPECT_EQ(r.resolved().dump(), R"({"a":2,"b":0.5})");
  EXPECT_NO_THROW(r.finish());
}

TEST(LabExperiments, FemHeatDemoWritesArtefactsAndManifest) {
  const fs::path dir = scratch("fem");
  lab::Sink sink(dir);
  lab::run_experiment(lab::Json::parse(R"({"experiment": "fem_heat_demo", "params": {"nx": 4, "ny": 4, "members": 50}})"), sink);
  const lab::Json manifest = lab::Json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest.at("experiment"), "fem_heat_demo");
  EXPECT_EQ(manifest.at("config").at("params").at("nx"), 4);
  EXPECT_EQ(manifest.at("config").at("params").at("blocks"), 4);
  for (const auto& file : manifest.at("files")) EXPECT_TRUE(fs::exists(dir / file.get<std::string>())) << file;
  EXPECT_TRUE(fs::exists(dir / "smoothing_precision.triplets"));
}

TEST(LabExperiments, FemHeatDemoChecks) {
  lab::Sink sink;
  lab::FemHeatParams p;
  p.nx = 5;
  p.ny = 4;
  const lab::FemHeatResult r = lab::run_fem_heat_demo(p, {}, sink);
  EXPECT_LT(r.max_row_sum, 1e-12);
  EXPECT_TRUE(r.pattern_ok);
  ASSERT_EQ(r.update_norm.size(), 4u);
  EXPECT_NEAR(r.update_norm.back() / r.exact_update_norm.back(), 1.0, 0.1);
}

TEST(LabExperiments, SmallResolutionSweep) {
  lab::Sink sink;
  lab::ResolutionSweepParams p;
  p.resolutions = {16, 32};
  p.members = 200;
  const lab::ResolutionSweepResult r = lab::run_resolution_sweep(p, {}, sink);
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto& row : r.rows) {
    EXPECT_GT(row.kld_euler, 0.0);
    EXPECT_GT(row.kld_enif, 0.0);
    EXPECT_GT(row.kld_es, row.kld_enif);
  }
  EXPECT_GT(r.rows[0].kld_euler, r.rows[1].kld_euler);
}

TEST(LabExperiments, SmallDependenceStrength) {
  lab::Sink sink;
  lab::DependenceParams p;
  p.phis = {0.0, 0.9};
  p.dim = 30;
  p.replicates = 3;
  const lab::DependenceResult r = lab::run_dependence_strength(p, {}, sink);
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto& row : r.rows) {
    EXPECT_LT(row.deviation_enif, row.deviation_es);
    EXPECT_EQ(row.first_member.rows(), 30);
    EXPECT_EQ(row.first_member.cols(), 4);
  }
}

TEST(LabExperiments, SmallLocalisationSweep) {
  lab::Sink sink;
  lab::LocalisationParams p;
  p.dim = 40;
  p.members = 60;
  p.radii = 5;
  const lab::LocalisationResult r = lab::run_localisation_sweep(p, {}, sink);
  ASSERT_EQ(r.c.size(), 5u);
  EXPECT_NEAR(r.c.front(), 1e-3, 1e-15);
  EXPECT_NEAR(r.c.back(), 1e3, 1e-9);
  EXPECT_TRUE(std::isfinite(r.kld_vanilla));
  EXPECT_GT(r.kld_vanilla, r.kld_enif);
}

TEST(LabExperiments, SmallLorenzRun) {
  lab::Sink sink;
  lab::LorenzParams p;
  p.states = 16;
  p.sizes = {60};
  p.max_order = 4;
  const lab::LorenzResult r = lab::run_lorenz96_markov_order(p, {}, sink);
  ASSERT_EQ(r.runs.size(), 1u);
  ASSERT_EQ(r.runs[0].curve.size(), 4u);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_LE(r.runs[0].curve[k].train, r.runs[0].curve[k - 1].train + 1e-12);
  EXPECT_GE(r.runs[0].best_order, 1);
}

TEST(LabExperiments, SmallGrfUpdate) {
  lab::Sink sink;
  lab::GrfParams p;
  p.grids = {8};
  p.members = 50;
  const lab::GrfResult r = lab::run_grf2d_update(p, {}, sink);
  ASSERT_EQ(r.grids.size(), 1u);
  ASSERT_EQ(r.grids[0].methods.size(), 3u);
  for (const auto& m : r.grids[0].methods) {
    EXPECT_EQ(m.mean_update.size(), 64);
    EXPECT_GE(m.band_energy, 0.0);
    EXPECT_LE(m.band_energy + m.off_band_energy, 1.0 + 1e-12);
  }
  EXPECT_GT(r.grids[0].h_support, 0.0);
}

TEST(LabExperiments, ExperimentsAreSeedReproducible) {
  lab::Sink sink;
  lab::DependenceParams p;
  p.phis = {0.5};
  p.dim = 20;
  p.replicates = 2;
  lab::Common a{7, 1}, b{7, 2};
  EXPECT_EQ(lab::run_dependence_strength(p, a, sink).rows[0].deviation_enif,
            lab::run_dependence_strength(p, b, sink).rows[0].deviation_enif);
}

TEST(LabCli, ExitCodes) {
  const fs::path dir = scratch("cli");
  const fs::path log = dir / "log.txt";
  EXPECT_EQ(run_cli("--version", log), 0);
  EXPECT_EQ(run_cli("--help", log), 0);
  EXPECT_EQ(run_cli("frobnicate", log), 2);
  EXPECT_EQ(run_cli("run " + (dir / "missing.json").string(), log), 2);

  write_file(dir / "typo.json", R"({"experiment": "fem_heat_demo", "params": {"nxx": 4}})");
  EXPECT_EQ(run_cli("run " + (dir / "typo.json").string() + " --output-root " + dir.string(), log), 2);
  EXPECT_NE(slurp(log).find("nxx"), std::string::npos);

  write_file(dir / "fem.json", R"({"experiment": "fem_heat_demo", "output": "fem", "params": {"nx": 3, "ny": 3, "members": 30}})");
  EXPECT_EQ(run_cli("run " + (dir / "fem.json").string() + " --output-root " + dir.string(), log), 0) << slurp(log);
  EXPECT_TRUE(fs::exists(dir / "fem" / "manifest.json"));
}

TEST(LabCli, SimulateAndAssimilate) {
  const fs::path dir = scratch("assim");
  const fs::path log = dir / "log.txt";
  const std::string prior = (dir / "prior.csv").string();
  ASSERT_EQ(run_cli("simulate --model ar1 -n 40 -p 10 --phi 0.6 --seed 3 -o " + prior + " --precision-out " +
                        (dir / "prec.txt").string(),
                    log),
            0)
      << slurp(log);
  write_file(dir / "h.txt", "1 10 1\n0 9 1.0\n");
  write_file(dir / "d.csv", "1.5\n");
  const std::string common = "assimilate --prior " + prior + " --observations " + (dir / "d.csv").string() +
                             " --operator " + (dir / "h.txt").string() + " --noise-variance 0.5 --seed 4";
  EXPECT_EQ(run_cli(common + " --method enif --graph-kind chain -o " + (dir / "post.csv").string(), log), 0) << slurp(log);
  EXPECT_TRUE(fs::exists(dir / "post.csv"));
  EXPECT_EQ(run_cli(common + " --method enif --precision " + (dir / "prec.txt").string() + " --summary " +
                        (dir / "s.json").string() + " -o " + (dir / "post2.csv").string(),
                    log),
            0)
      << slurp(log);
  EXPECT_EQ(run_cli(common + " --method es -o " + (dir / "post3.csv").string(), log), 0) << slurp(log);
  EXPECT_EQ(run_cli(common + " --method enif-mda --alphas 0.5,0.5 --graph-kind chain -o " + (dir / "post4.csv").string(), log), 0)
      << slurp(log);

  // Dimension mismatch is an input error; an indefinite precision is a numerical failure.
  write_file(dir / "h_bad.txt", "1 11 1\n0 9 1.0\n");
  EXPECT_EQ(run_cli("assimilate --prior " + prior + " --observations " + (dir / "d.csv").string() + " --operator " +
                        (dir / "h_bad.txt").string() + " --method es",
                    log),
            2);
  std::string indefinite = "10 10\n";
  for (int i = 0; i < 10; ++i) indefinite += std::to_string(i) + " " + std::to_string(i) + (i == 3 ? " -1\n" : " 1\n");
  write_file(dir / "indef.txt", indefinite);
  EXPECT_EQ(run_cli(common + " --method enif --precision " + (dir / "indef.txt").string(), log), 3) << slurp(log);
}

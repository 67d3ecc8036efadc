#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "tapdoe/config.hpp"
#include "tapdoe/errors.hpp"
#include "tapdoe/io.hpp"
#include "tapdoe/workflow.hpp"
#include "test_helpers.hpp"

using namespace tapdoe;
using tapdoe::testing::data_path;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tapdoe_wf_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Two-parameter fit over a four-design space keeps these runs to seconds.
const char* kSmall = R"([mechanism]
files = mech1.mech
free = dG0, Ga3

[design_space]
gases = C3H8, O2
intensities.C3H8 = 1
intensities.O2 = 1, 2
delayed_gas = C3H8
delays = 0
temperatures = 650, 750

[workflow]
threads = 1
)";

RunConfig small(const std::string& extra = "") { return parse_config(std::string(kSmall) + extra, data_path("")); }

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(TAPDOE_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Workflow, SetupResolvesSigmaFromTruthPeaks) {
  const auto setup = build_setup(small());
  EXPECT_EQ(setup.initial.free_names(), (std::vector<std::string>{"dG0", "Ga3"}));
  EXPECT_DOUBLE_EQ(setup.initial.value("dG0"), -0.3);
  EXPECT_DOUBLE_EQ(setup.initial.value("Ga3"), 1.5);
  EXPECT_DOUBLE_EQ(setup.truth.value("Ga3"), 1.54);
  EXPECT_NEAR(setup.sigma.at("C3H8"), 0.04, 0.004);
  EXPECT_NEAR(setup.sigma.at("CO2"), 0.006, 0.0006);
}

TEST(Workflow, ZeroIterationsGivesInitialFitOnly) {
  const auto report = run_precision_workflow(small("max_iterations = 0\n"));
  ASSERT_EQ(report.iterations.size(), 1u);
  ASSERT_EQ(report.experiments.size(), 1u);
  EXPECT_EQ(report.experiments[0].origin, "initial");
  EXPECT_FALSE(report.iterations[0].chosen.has_value());
  EXPECT_EQ(report.stop_reason, "maximum iterations reached");
  EXPECT_NEAR(report.iterations[0].fit.params.value("Ga3"), 1.54, 0.01);
}

TEST(Workflow, IdenticalCandidatesHaveNoDiscriminatingDesign) {
  auto cfg = small();
  cfg.mechanisms = {{"a", data_path("mech1.mech")}, {"b", data_path("mech1.mech")}};
  cfg.truth = "a";
  const auto report = run_divergence_workflow(cfg);
  EXPECT_FALSE(report.discriminating_design);
  EXPECT_FALSE(report.experiment.has_value());
  ASSERT_FALSE(report.warnings.empty());
  EXPECT_NE(report.warnings[0].find("no discriminating design exists"), std::string::npos);
}

TEST(Workflow, EmptyDesignSpaceIsAnInputError) {
  auto cfg = small("max_iterations = 1\n");
  cfg.space.temperatures.clear();
  try {
    run_precision_workflow(cfg);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("design space is empty"), std::string::npos);
  }
}

TEST(Workflow, StudyDesignIndicesAreChecked) {
  auto cfg = small();
  cfg.study_designs = {3, 0};
  const auto d = study_designs(cfg);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d[0].temperature, 750.0);
  cfg.study_designs = {4};
  EXPECT_THROW(study_designs(cfg), InputError);
}

TEST(Cli, MissingMechanismFileExitsWithCode2) {
  const auto dir = scratch_dir("cli_missing");
  write_text(dir / "bad.ini", "[mechanism]\nfiles = nowhere.mech\n");
  const int code = run_cli("simulate --quiet --config " + (dir / "bad.ini").string() + " --out " + (dir / "out").string(),
                           dir / "log.txt");
  EXPECT_EQ(code, 2);
  EXPECT_NE(read_text(dir / "log.txt").find("nowhere.mech"), std::string::npos);
}

TEST(Cli, SimulateWritesFiveGasCsv) {
  const auto dir = scratch_dir("cli_sim");
  const auto out = dir / "out";
  const std::string args = "simulate --quiet --config " + data_path("opdh_precision.ini") + " --out ";
  ASSERT_EQ(run_cli(args + out.string(), dir / "log.txt"), 0) << read_text(dir / "log.txt");
  const auto flux = read_flux_csv(out / "flux.csv");
  EXPECT_EQ(flux.gases, (std::vector<std::string>{"C3H8", "O2", "C3H6", "H2O", "CO2"}));
  EXPECT_EQ(flux.time.size(), 2500u);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));

  ASSERT_EQ(run_cli(args + (dir / "again").string(), dir / "log2.txt"), 0);
  EXPECT_EQ(read_text(out / "flux.csv"), read_text(dir / "again" / "flux.csv"));
}

TEST(Cli, ZeroIntensityGivesZeroFlux) {
  const auto dir = scratch_dir("cli_zero");
  write_text(dir / "zero.ini", "[mechanism]\nfiles = " + data_path("mech1.mech") +
                                   "\n[design]\ngases = C3H8, O2\nintensities = 0, 0\n");
  ASSERT_EQ(run_cli("simulate --quiet --config " + (dir / "zero.ini").string() + " --out " + (dir / "out").string(),
                    dir / "log.txt"),
            0)
      << read_text(dir / "log.txt");
  const auto flux = read_flux_csv(dir / "out" / "flux.csv");
  EXPECT_EQ(flux.values.rows(), 2500);
  EXPECT_EQ(flux.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Cli, UnknownSubcommandIsAUsageError) {
  const auto dir = scratch_dir("cli_usage");
  EXPECT_EQ(run_cli("frobnicate", dir / "log.txt"), 2);
}

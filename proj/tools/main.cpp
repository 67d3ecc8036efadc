// tap-doe: simulate, fit and design TAP pulse experiments from a config file.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tapdoe/config.hpp"
#include "tapdoe/errors.hpp"
#include "tapdoe/workflow.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  bool refit = false;
  std::optional<std::string> criterion;
  std::optional<std::string> subset;
  std::optional<unsigned> threads;
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

tapdoe::RunConfig load(const std::string& path, const Overrides& o) {
  auto cfg = tapdoe::load_config(path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.refit) cfg.refit_enabled = true;
  if (o.criterion) cfg.criterion = tapdoe::parse_criterion(*o.criterion);
  if (o.subset) cfg.subset = split(*o.subset);
  if (o.threads) cfg.threads = *o.threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TAP pulse-response simulation, parameter estimation and experiment design"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string study_kind;
  bool quiet = false;
  Overrides overrides;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", overrides.seed, "random seed override");
    sub->add_option("--threads", overrides.threads, "worker threads (0 = all cores)");
    sub->add_flag("--quiet", quiet, "suppress progress messages");
  };
  auto add_design = [&](CLI::App* sub) {
    sub->add_option("--criterion", overrides.criterion, "optimality criterion")->check(CLI::IsMember({"A", "D", "E"}));
    sub->add_option("--subset", overrides.subset, "restrict the criterion to NAME[,NAME...]");
  };

  auto* simulate = app.add_subcommand("simulate", "simulate the configured design");
  auto* fit = app.add_subcommand("fit", "fit the free parameters to a synthetic experiment");
  auto* doe_precision = app.add_subcommand("doe-precision", "rank designs by predicted parameter precision");
  auto* doe_divergence = app.add_subcommand("doe-divergence", "rank designs by divergence between mechanisms");
  auto* wf_precision = app.add_subcommand("workflow-precision", "iterative design for parameter precision");
  auto* wf_divergence = app.add_subcommand("workflow-divergence", "design and run a discriminating experiment");
  auto* study = app.add_subcommand("study", "predicted-vs-actual or divergence-BIC study");
  for (auto* sub : {simulate, fit, doe_precision, doe_divergence, wf_precision, wf_divergence, study}) add_common(sub);
  for (auto* sub : {doe_precision, wf_precision, study}) add_design(sub);
  for (auto* sub : {wf_divergence, study}) sub->add_flag("--refit", overrides.refit, "refit candidates before BIC");
  study->add_option("kind", study_kind, "predicted-vs-actual | divergence-bic")
      ->required()
      ->check(CLI::IsMember({"predicted-vs-actual", "divergence-bic"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const tapdoe::Logger log = [&](const std::string& msg) {
    if (!quiet) std::cerr << msg << "\n";
  };
  try {
    const auto cfg = load(config_path, overrides);
    const std::filesystem::path out = out_dir;
    if (*simulate) tapdoe::cmd_simulate(cfg, out, log);
    else if (*fit) tapdoe::cmd_fit(cfg, out, log);
    else if (*doe_precision) tapdoe::cmd_doe_precision(cfg, out, log);
    else if (*doe_divergence) tapdoe::cmd_doe_divergence(cfg, out, log);
    else if (*wf_precision) tapdoe::cmd_workflow_precision(cfg, out, log);
    else if (*wf_divergence) tapdoe::cmd_workflow_divergence(cfg, out, log);
    else if (*study) tapdoe::cmd_study(cfg, tapdoe::parse_study_kind(study_kind), out, log);
  } catch (const tapdoe::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const tapdoe::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "tapdoe/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tapdoe/errors.hpp"

namespace tapdoe {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("config key '" + key + "': '" + text + "' is not a number");
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(to_double(key, item));
  return out;
}

long long to_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("config key '" + key + "': '" + text + "' is not an integer");
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw InputError("config key '" + key + "': '" + text + "' is not a boolean");
}

// Reads keys of one section and remembers which were consumed, so typos are reported.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> get(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    auto child = tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!child) return std::nullopt;
    return trim(child->data());
  }
  std::string full(const std::string& key) const { return name_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (auto v = get(key)) out = to_double(full(key), *v);
  }
  void integer(const std::string& key, int& out) {
    if (auto v = get(key)) out = static_cast<int>(to_integer(full(key), *v));
  }
  void flag(const std::string& key, bool& out) {
    if (auto v = get(key)) out = to_bool(full(key), *v);
  }

  void check_unknown() const {
    if (!tree_) return;
    for (const auto& [key, value] : *tree_) {
      if (!used_.count(key)) throw InputError("unknown config key '" + full(key) + "'");
    }
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> used_;
};

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    // the INI reader only knows ';' comments
    std::string cleaned;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      const auto first = line.find_first_not_of(" \t");
      if (first != std::string::npos && line[first] == '#') line[first] = ';';
      cleaned += line + "\n";
    }
    std::istringstream in(cleaned);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InputError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  static const std::set<std::string> known = {"mechanism",      "reactor_sim",   "design",         "synthetic_data",
                                              "estimation",     "design_space",  "doe_precision",  "doe_divergence",
                                              "workflow"};
  for (const auto& [name, child] : tree) {
    if (!known.count(name)) throw InputError("unknown config section [" + name + "]");
  }
  auto section = [&](const std::string& name) {
    auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name);
  };

  RunConfig cfg;
  {
    auto s = section("mechanism");
    if (auto files = s.get("files")) {
      std::vector<std::string> labels;
      if (auto l = s.get("labels")) labels = split_list(*l);
      const auto paths = split_list(*files);
      if (!labels.empty() && labels.size() != paths.size()) {
        throw InputError("mechanism.labels must name every entry of mechanism.files");
      }
      for (std::size_t i = 0; i < paths.size(); ++i) {
        std::filesystem::path p = paths[i];
        if (p.is_relative()) p = base_dir / p;
        cfg.mechanisms.push_back({labels.empty() ? p.stem().string() : labels[i], p});
      }
    } else {
      s.get("labels");
    }
    if (auto v = s.get("truth")) cfg.truth = *v;
    if (auto v = s.get("free")) cfg.free = split_list(*v);
    if (auto v = s.get("refit")) cfg.refit = split_list(*v);
    s.number("initial_reaction", cfg.initial_reaction);
    s.number("initial_activation", cfg.initial_activation);
    s.check_unknown();
  }
  {
    auto s = section("reactor_sim");
    if (auto v = s.get("zone_lengths")) {
      auto z = to_doubles(s.full("zone_lengths"), *v);
      if (z.size() != 3) throw InputError("reactor_sim.zone_lengths needs three values");
      std::copy(z.begin(), z.end(), cfg.geometry.zone_lengths.begin());
    }
    if (auto v = s.get("void_fractions")) {
      auto z = to_doubles(s.full("void_fractions"), *v);
      if (z.size() == 1) z.assign(3, z[0]);
      if (z.size() != 3) throw InputError("reactor_sim.void_fractions needs one or three values");
      std::copy(z.begin(), z.end(), cfg.geometry.void_fractions.begin());
    }
    s.number("area", cfg.geometry.cross_section_area);
    s.number("reference_diffusivity", cfg.geometry.reference_diffusivity);
    s.number("reference_mass", cfg.geometry.reference_mass);
    s.number("reference_temperature", cfg.geometry.reference_temperature);
    s.integer("intervals", cfg.simulation.intervals);
    s.number("dt", cfg.simulation.dt);
    s.number("pulse_width", cfg.simulation.pulse_width);
    s.integer("max_halvings", cfg.simulation.max_halvings);
    s.number("horizon", cfg.design.horizon);
    s.check_unknown();
  }
  {
    auto s = section("design");
    std::vector<std::string> gases = {"C3H8", "O2"};
    std::vector<double> intensities = {1.0, 1.0};
    std::vector<double> delays = {0.0, 0.0};
    bool delays_given = false;
    if (auto v = s.get("gases")) gases = split_list(*v);
    if (auto v = s.get("intensities")) intensities = to_doubles(s.full("intensities"), *v);
    if (auto v = s.get("delays")) {
      delays = to_doubles(s.full("delays"), *v);
      delays_given = true;
    }
    if (!delays_given) delays.assign(gases.size(), 0.0);
    if (intensities.size() != gases.size() || delays.size() != gases.size()) {
      throw InputError("design.intensities and design.delays need one value per design.gases entry");
    }
    cfg.design.pulses.clear();
    for (std::size_t i = 0; i < gases.size(); ++i) cfg.design.pulses.push_back({gases[i], intensities[i], delays[i]});
    s.number("temperature", cfg.design.temperature);
    s.check_unknown();
  }
  {
    auto s = section("synthetic_data");
    s.number("noise_relative", cfg.noise_relative);
    if (auto v = s.get("noise_sigma")) {
      for (const auto& item : split_list(*v)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw InputError("synthetic_data.noise_sigma entries look like GAS:value");
        cfg.noise_sigma[trim(item.substr(0, colon))] = to_double(s.full("noise_sigma"), item.substr(colon + 1));
      }
    }
    if (auto v = s.get("seed")) cfg.seed = static_cast<std::uint64_t>(to_integer(s.full("seed"), *v));
    s.number("perturbation", cfg.perturbation);
    s.check_unknown();
  }
  {
    auto s = section("estimation");
    if (auto v = s.get("method")) {
      if (*v == "lm" || *v == "levenberg_marquardt") cfg.fit.method = FitMethod::levenberg_marquardt;
      else if (*v == "bfgs") cfg.fit.method = FitMethod::bfgs;
      else throw InputError("estimation.method must be lm or bfgs");
    }
    if (auto v = s.get("hessian")) {
      if (*v == "gauss_newton") cfg.fit.hessian = HessianMode::gauss_newton;
      else if (*v == "finite_difference") cfg.fit.hessian = HessianMode::finite_difference;
      else throw InputError("estimation.hessian must be gauss_newton or finite_difference");
    }
    s.integer("max_iterations", cfg.fit.max_iterations);
    s.number("gradient_tolerance", cfg.fit.gradient_tolerance);
    s.number("objective_tolerance", cfg.fit.objective_tolerance);
    s.number("step_tolerance", cfg.fit.step_tolerance);
    s.number("jacobian_step", cfg.fit.jacobian_step);
    s.number("hessian_step", cfg.fit.hessian_step);
    s.check_unknown();
  }
  {
    auto s = section("design_space");
    if (auto v = s.get("gases")) {
      cfg.space.intensities.clear();
      for (const auto& gas : split_list(*v)) cfg.space.intensities.push_back({gas, {0.5, 1.0, 2.0}});
    }
    for (auto& [gas, levels] : cfg.space.intensities) {
      if (auto v = s.get("intensities." + gas)) levels = to_doubles(s.full("intensities." + gas), *v);
    }
    if (auto v = s.get("delayed_gas")) cfg.space.delayed_gas = *v;
    if (auto v = s.get("delays")) cfg.space.delays = to_doubles(s.full("delays"), *v);
    if (auto v = s.get("temperatures")) cfg.space.temperatures = to_doubles(s.full("temperatures"), *v);
    cfg.space.horizon = cfg.design.horizon;
    s.check_unknown();
  }
  {
    auto s = section("doe_precision");
    if (auto v = s.get("criterion")) cfg.criterion = parse_criterion(*v);
    if (auto v = s.get("subset")) cfg.subset = split_list(*v);
    s.number("sensitivity_step", cfg.sensitivity_step);
    s.check_unknown();
  }
  {
    auto s = section("doe_divergence");
    s.flag("refit", cfg.refit_enabled);
    if (auto v = s.get("bic_form")) cfg.bic_form = parse_bic_form(*v);
    s.number("bic_gap_threshold", cfg.bic_gap_threshold);
    s.check_unknown();
  }
  {
    auto s = section("workflow");
    s.integer("max_iterations", cfg.max_iterations);
    s.number("stop_factor", cfg.stop_factor);
    if (auto v = s.get("threads")) cfg.threads = static_cast<unsigned>(to_integer(s.full("threads"), *v));
    if (auto v = s.get("study_designs")) {
      for (const auto& item : split_list(*v)) {
        cfg.study_designs.push_back(static_cast<std::size_t>(to_integer(s.full("study_designs"), item)));
      }
    }
    s.check_unknown();
  }
  if (cfg.truth.empty() && !cfg.mechanisms.empty()) cfg.truth = cfg.mechanisms.front().label;
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  if (mechanisms.empty()) throw InputError("config names no mechanism file (mechanism.files)");
  std::set<std::string> labels;
  for (const auto& m : mechanisms) {
    if (!labels.insert(m.label).second) throw InputError("duplicate mechanism label '" + m.label + "'");
    if (!std::filesystem::exists(m.file)) throw InputError("mechanism file not found: " + m.file.string());
  }
  if (!labels.count(truth)) throw InputError("mechanism.truth '" + truth + "' is not a listed mechanism");
  for (const auto& r : refit) {
    if (!labels.count(r)) throw InputError("mechanism.refit names unknown label '" + r + "'");
  }
  if (max_iterations < 0) throw InputError("workflow.max_iterations must be >= 0");
  if (!(stop_factor > 0.0)) throw InputError("workflow.stop_factor must be > 0");
  if (!(noise_relative >= 0.0)) throw InputError("synthetic_data.noise_relative must be >= 0");
  if (!(perturbation >= 0.0)) throw InputError("synthetic_data.perturbation must be >= 0");
  if (!(sensitivity_step > 0.0)) throw InputError("doe_precision.sensitivity_step must be > 0");
  if (fit.max_iterations < 0) throw InputError("estimation.max_iterations must be >= 0");
  geometry.validate();
  design.validate();
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig cfg = parse_config(buffer.str(), path.parent_path().empty() ? "." : path.parent_path());
  cfg.source = path;
  return cfg;
}

}  // namespace tapdoe

#include "tapdoe/mechanism.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tapdoe/errors.hpp"

namespace tapdoe {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_number(std::string_view text, int line, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ParseError(line, "invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

bool valid_name(std::string_view name) {
  if (name.empty() || std::isdigit(static_cast<unsigned char>(name.front()))) return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '+' || c == ':' || c == '=' || c == '#';
  });
}

// key=value attributes following a species name.
std::map<std::string, std::string, std::less<>> parse_attributes(
    const std::vector<std::string_view>& tokens, int line) {
  std::map<std::string, std::string, std::less<>> attrs;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    auto eq = tokens[i].find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ParseError(line, "expected key=value, got '" + std::string(tokens[i]) + "'");
    }
    auto [it, inserted] =
        attrs.emplace(std::string(tokens[i].substr(0, eq)), std::string(tokens[i].substr(eq + 1)));
    if (!inserted) throw ParseError(line, "duplicate attribute '" + it->first + "'");
  }
  return attrs;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<StoichTerm> parse_side(std::string_view side, int line) {
  std::vector<StoichTerm> terms;
  std::size_t start = 0;
  while (start <= side.size()) {
    std::size_t plus = side.find('+', start);
    std::string_view token = trim(side.substr(start, plus == std::string_view::npos ? side.npos : plus - start));
    if (token.empty()) throw ParseError(line, "empty term in reaction");
    std::size_t digits = 0;
    while (digits < token.size() && std::isdigit(static_cast<unsigned char>(token[digits]))) ++digits;
    int coeff = 1;
    if (digits > 0) {
      std::from_chars(token.data(), token.data() + digits, coeff);
      if (coeff < 1) throw ParseError(line, "stoichiometric coefficient must be >= 1");
    }
    std::string_view name = trim(token.substr(digits));
    if (!valid_name(name)) throw ParseError(line, "invalid species term '" + std::string(token) + "'");
    auto existing = std::find_if(terms.begin(), terms.end(), [&](const StoichTerm& t) { return t.species == name; });
    if (existing != terms.end()) {
      existing->coefficient += coeff;
    } else {
      terms.push_back({std::string(name), coeff});
    }
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return terms;
}

std::string format_side(const std::vector<StoichTerm>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) out += " + ";
    if (terms[i].coefficient != 1) out += std::to_string(terms[i].coefficient);
    out += terms[i].species;
  }
  return out;
}

std::string format_composition(const std::map<std::string, int>& comp) {
  std::string out;
  for (const auto& [element, count] : comp) {
    out += element;
    if (count != 1) out += std::to_string(count);
  }
  return out;
}

}  // namespace

std::string_view to_string(SpeciesKind kind) {
  switch (kind) {
    case SpeciesKind::gas: return "gas";
    case SpeciesKind::adsorbate: return "adsorbate";
    case SpeciesKind::site: return "site";
  }
  return "unknown";
}

std::map<std::string, int> parse_formula(std::string_view formula) {
  std::map<std::string, int> out;
  std::size_t i = 0;
  while (i < formula.size()) {
    if (!std::isupper(static_cast<unsigned char>(formula[i]))) {
      throw InputError("invalid chemical formula '" + std::string(formula) + "'");
    }
    std::size_t j = i + 1;
    while (j < formula.size() && std::islower(static_cast<unsigned char>(formula[j]))) ++j;
    std::string element(formula.substr(i, j - i));
    std::size_t k = j;
    while (k < formula.size() && std::isdigit(static_cast<unsigned char>(formula[k]))) ++k;
    int count = 1;
    if (k > j) std::from_chars(formula.data() + j, formula.data() + k, count);
    out[element] += count;
    i = k;
  }
  return out;
}

Mechanism Mechanism::create(std::string name, std::vector<Species> species, std::vector<ReactionStep> steps,
                            double standard_concentration) {
  Mechanism m;
  m.name_ = std::move(name);
  if (!(standard_concentration > 0.0) || !std::isfinite(standard_concentration)) {
    throw InputError("standard concentration must be positive");
  }
  m.standard_concentration_ = standard_concentration;

  // canonical row order: gases, adsorbates, sites
  for (SpeciesKind kind : {SpeciesKind::gas, SpeciesKind::adsorbate, SpeciesKind::site}) {
    for (const auto& s : species) {
      if (s.kind == kind) m.species_.push_back(s);
    }
  }
  m.n_gas_ = static_cast<std::size_t>(
      std::count_if(species.begin(), species.end(), [](const Species& s) { return s.kind == SpeciesKind::gas; }));
  m.n_adsorbate_ = static_cast<std::size_t>(std::count_if(
      species.begin(), species.end(), [](const Species& s) { return s.kind == SpeciesKind::adsorbate; }));

  std::set<std::string> site_types;
  for (std::size_t i = 0; i < m.species_.size(); ++i) {
    const auto& s = m.species_[i];
    if (!valid_name(s.name)) throw InputError("invalid species name '" + s.name + "'");
    if (!m.index_.emplace(s.name, i).second) throw InputError("duplicate species name '" + s.name + "'");
    if (s.kind == SpeciesKind::site) {
      if (s.site_type != s.name) throw InputError("site '" + s.name + "' must name its own site type");
      if (!(s.site_concentration >= 0.0)) throw InputError("site '" + s.name + "' concentration must be >= 0");
      site_types.insert(s.name);
    }
    if (s.kind == SpeciesKind::gas && !(s.molar_mass > 0.0)) {
      throw InputError("gas '" + s.name + "' must have molar mass > 0");
    }
  }
  for (const auto& s : m.species_) {
    if (s.kind == SpeciesKind::adsorbate && !site_types.contains(s.site_type)) {
      throw InputError("adsorbate '" + s.name + "' references undeclared site type '" + s.site_type + "'");
    }
  }
  if (m.n_gas_ == 0) throw InputError("mechanism needs at least one gas species");
  if (site_types.empty()) throw InputError("mechanism needs at least one site type");

  for (std::size_t j = 0; j < steps.size(); ++j) {
    const auto& step = steps[j];
    const int line = step.source_line;
    if (step.reactants.empty() || step.products.empty()) throw ParseError(line, "reaction side is empty");
    if (!std::isfinite(step.delta_g) || !std::isfinite(step.g_activation)) {
      throw ParseError(line, "non-finite free energy");
    }
    std::map<std::string, int> site_balance;
    std::map<std::string, int> element_balance;
    bool composition_known = true;
    auto accumulate = [&](const std::vector<StoichTerm>& side, int sign) {
      for (const auto& term : side) {
        auto it = m.index_.find(term.species);
        if (it == m.index_.end()) throw ParseError(line, "unknown species '" + term.species + "' in step");
        if (term.coefficient < 1) throw ParseError(line, "stoichiometric coefficient must be >= 1");
        const auto& s = m.species_[it->second];
        if (s.kind != SpeciesKind::gas) site_balance[s.site_type] += sign * term.coefficient;
        if (s.kind != SpeciesKind::site) {
          if (s.composition.empty()) composition_known = false;
          for (const auto& [element, count] : s.composition) element_balance[element] += sign * term.coefficient * count;
        }
      }
    };
    accumulate(step.reactants, -1);
    accumulate(step.products, +1);
    for (const auto& [type, net] : site_balance) {
      if (net != 0) {
        throw ParseError(line, "site-type imbalance for '" + type + "' in step " + std::to_string(j) + " (net " +
                                   std::to_string(net) + ")");
      }
    }
    if (composition_known) {
      for (const auto& [element, net] : element_balance) {
        if (net != 0) throw ParseError(line, "elemental imbalance for '" + element + "' in step " + std::to_string(j));
      }
    }
    if (step.g_activation < std::max(0.0, step.delta_g)) {
      m.warnings_.push_back("step " + std::to_string(j) + ": activation energy " + format_double(step.g_activation) +
                            " eV is below max(0, dG) = " + format_double(std::max(0.0, step.delta_g)) + " eV");
    }
  }
  m.steps_ = std::move(steps);
  return m;
}

std::vector<std::string> Mechanism::gas_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n_gas_; ++i) out.push_back(species_[i].name);
  return out;
}

std::vector<std::string> Mechanism::surface_names() const {
  std::vector<std::string> out;
  for (std::size_t i = n_gas_; i < species_.size(); ++i) out.push_back(species_[i].name);
  return out;
}

std::optional<std::size_t> Mechanism::find(std::string_view species_name) const {
  auto it = index_.find(std::string(species_name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Mechanism::index_of(std::string_view species_name) const {
  auto idx = find(species_name);
  if (!idx) throw InputError("unknown species '" + std::string(species_name) + "' in mechanism " + name_);
  return *idx;
}

std::optional<std::string> Mechanism::site_type_of(std::size_t species_index) const {
  const auto& s = species_.at(species_index);
  if (s.kind == SpeciesKind::gas) return std::nullopt;
  return s.site_type;
}

std::vector<double> Mechanism::initial_surface() const {
  std::vector<double> u(surface_count(), 0.0);
  for (std::size_t i = n_gas_; i < species_.size(); ++i) {
    if (species_[i].kind == SpeciesKind::site) u[i - n_gas_] = species_[i].site_concentration;
  }
  return u;
}

Mechanism parse_mechanism(std::string_view text, std::string name) {
  enum class Section { none, gas, site, adsorbate, steps, kinetics };
  Section section = Section::none;
  std::vector<Species> species;
  std::vector<ReactionStep> steps;
  double standard_conc = 1.0;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "malformed section header");
      std::string_view header = trim(line.substr(1, line.size() - 2));
      if (header == "gas") section = Section::gas;
      else if (header == "site") section = Section::site;
      else if (header == "adsorbate") section = Section::adsorbate;
      else if (header == "steps") section = Section::steps;
      else if (header == "kinetics") section = Section::kinetics;
      else throw ParseError(line_no, "unknown section [" + std::string(header) + "]");
      continue;
    }

    switch (section) {
      case Section::none:
        throw ParseError(line_no, "content before the first section header");
      case Section::gas:
      case Section::site:
      case Section::adsorbate: {
        auto tokens = split_ws(line);
        Species s;
        s.name = std::string(tokens.front());
        if (!valid_name(s.name)) throw ParseError(line_no, "invalid species name '" + s.name + "'");
        auto attrs = parse_attributes(tokens, line_no);
        auto take = [&](std::string_view key) -> std::optional<std::string> {
          auto it = attrs.find(key);
          if (it == attrs.end()) return std::nullopt;
          std::string v = it->second;
          attrs.erase(it);
          return v;
        };
        if (section == Section::gas) {
          s.kind = SpeciesKind::gas;
          auto mass = take("mass");
          if (!mass) throw ParseError(line_no, "gas '" + s.name + "' needs mass=<amu>");
          s.molar_mass = parse_number(*mass, line_no, "mass");
          if (!(s.molar_mass > 0.0)) throw ParseError(line_no, "gas '" + s.name + "' mass must be > 0");
        } else if (section == Section::site) {
          s.kind = SpeciesKind::site;
          s.site_type = s.name;
          auto conc = take("conc");
          if (!conc) throw ParseError(line_no, "site '" + s.name + "' needs conc=<mol/m3>");
          s.site_concentration = parse_number(*conc, line_no, "conc");
          if (s.site_concentration < 0.0) throw ParseError(line_no, "site concentration must be >= 0");
        } else {
          s.kind = SpeciesKind::adsorbate;
          auto site = take("site");
          if (!site) throw ParseError(line_no, "adsorbate '" + s.name + "' needs site=<symbol>");
          s.site_type = *site;
        }
        if (auto comp = take("comp")) {
          try {
            s.composition = parse_formula(*comp);
          } catch (const InputError& e) {
            throw ParseError(line_no, e.what());
          }
        }
        if (!attrs.empty()) throw ParseError(line_no, "unknown attribute '" + attrs.begin()->first + "'");
        if (std::any_of(species.begin(), species.end(), [&](const Species& o) { return o.name == s.name; })) {
          throw ParseError(line_no, "duplicate species name '" + s.name + "'");
        }
        species.push_back(std::move(s));
        break;
      }
      case Section::kinetics: {
        auto tokens = split_ws(line);
        for (auto token : tokens) {
          auto eq = token.find('=');
          if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
          auto key = token.substr(0, eq);
          if (key != "standard_conc") throw ParseError(line_no, "unknown kinetics key '" + std::string(key) + "'");
          standard_conc = parse_number(token.substr(eq + 1), line_no, "standard_conc");
          if (!(standard_conc > 0.0)) throw ParseError(line_no, "standard_conc must be > 0");
        }
        break;
      }
      case Section::steps: {
        auto colon = line.find(':');
        if (colon == std::string_view::npos) throw ParseError(line_no, "step needs ': dG=<eV> Ga=<eV>'");
        std::string_view equation = trim(line.substr(0, colon));
        ReactionStep step;
        step.source_line = line_no;
        std::size_t arrow = equation.find("<->");
        std::size_t arrow_len = 3;
        if (arrow == std::string_view::npos) {
          arrow = equation.find("->");
          arrow_len = 2;
          step.reversible = false;
        }
        if (arrow == std::string_view::npos) throw ParseError(line_no, "step needs '<->' or '->'");
        step.reactants = parse_side(equation.substr(0, arrow), line_no);
        step.products = parse_side(equation.substr(arrow + arrow_len), line_no);

        auto tokens = split_ws(line.substr(colon + 1));
        bool have_dg = false, have_ga = false;
        for (auto token : tokens) {
          auto eq = token.find('=');
          if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value after ':'");
          auto key = token.substr(0, eq);
          auto value = token.substr(eq + 1);
          if (key == "dG") {
            step.delta_g = parse_number(value, line_no, "dG");
            have_dg = true;
          } else if (key == "Ga") {
            step.g_activation = parse_number(value, line_no, "Ga");
            have_ga = true;
          } else {
            throw ParseError(line_no, "unknown step attribute '" + std::string(key) + "'");
          }
        }
        if (!have_dg || !have_ga) throw ParseError(line_no, "step needs both dG and Ga");
        steps.push_back(std::move(step));
        break;
      }
    }
  }

  if (steps.empty()) throw ParseError(0, "no reaction steps");
  try {
    return Mechanism::create(std::move(name), std::move(species), std::move(steps), standard_conc);
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(0, e.what());
  }
}

Mechanism load_mechanism(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mechanism file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_mechanism(buffer.str(), std::filesystem::path(path).stem().string());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

std::string serialize_mechanism(const Mechanism& mechanism) {
  std::ostringstream out;
  out << "# " << mechanism.name() << "\n[gas]\n";
  for (const auto& s : mechanism.species()) {
    if (s.kind != SpeciesKind::gas) continue;
    out << s.name << " mass=" << format_double(s.molar_mass);
    if (!s.composition.empty()) out << " comp=" << format_composition(s.composition);
    out << "\n";
  }
  out << "[site]\n";
  for (const auto& s : mechanism.species()) {
    if (s.kind == SpeciesKind::site) out << s.name << " conc=" << format_double(s.site_concentration) << "\n";
  }
  out << "[adsorbate]\n";
  for (const auto& s : mechanism.species()) {
    if (s.kind != SpeciesKind::adsorbate) continue;
    out << s.name << " site=" << s.site_type;
    if (!s.composition.empty()) out << " comp=" << format_composition(s.composition);
    out << "\n";
  }
  if (mechanism.standard_concentration() != 1.0) {
    out << "[kinetics]\nstandard_conc=" << format_double(mechanism.standard_concentration()) << "\n";
  }
  out << "[steps]\n";
  for (const auto& step : mechanism.steps()) {
    out << format_side(step.reactants) << (step.reversible ? " <-> " : " -> ") << format_side(step.products)
        << " : dG=" << format_double(step.delta_g) << " Ga=" << format_double(step.g_activation) << "\n";
  }
  return out.str();
}

bool operator==(const Mechanism& a, const Mechanism& b) {
  auto same_terms = [](const std::vector<StoichTerm>& x, const std::vector<StoichTerm>& y) {
    return std::equal(x.begin(), x.end(), y.begin(), y.end(), [](const StoichTerm& p, const StoichTerm& q) {
      return p.species == q.species && p.coefficient == q.coefficient;
    });
  };
  auto same_species = [](const Species& p, const Species& q) {
    return p.name == q.name && p.kind == q.kind && p.molar_mass == q.molar_mass && p.site_type == q.site_type &&
           p.site_concentration == q.site_concentration && p.composition == q.composition;
  };
  auto same_step = [&](const ReactionStep& p, const ReactionStep& q) {
    return same_terms(p.reactants, q.reactants) && same_terms(p.products, q.products) && p.delta_g == q.delta_g &&
           p.g_activation == q.g_activation && p.reversible == q.reversible;
  };
  return a.standard_concentration() == b.standard_concentration() &&
         std::equal(a.species().begin(), a.species().end(), b.species().begin(), b.species().end(), same_species) &&
         std::equal(a.steps().begin(), a.steps().end(), b.steps().begin(), b.steps().end(), same_step);
}

StoichiometryMatrix stoichiometry_matrix(const Mechanism& mechanism) {
  StoichiometryMatrix m;
  const auto& species = mechanism.species();
  for (const auto& s : species) m.row_names.push_back(s.name);
  m.entries = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(species.size()),
                                    static_cast<Eigen::Index>(mechanism.steps().size()));
  for (std::size_t j = 0; j < mechanism.steps().size(); ++j) {
    const auto& step = mechanism.steps()[j];
    for (const auto& t : step.reactants) {
      m.entries(static_cast<Eigen::Index>(mechanism.index_of(t.species)), static_cast<Eigen::Index>(j)) -= t.coefficient;
    }
    for (const auto& t : step.products) {
      m.entries(static_cast<Eigen::Index>(mechanism.index_of(t.species)), static_cast<Eigen::Index>(j)) += t.coefficient;
    }
  }
  return m;
}

}  // namespace tapdoe

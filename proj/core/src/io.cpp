#include "tapdoe/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tapdoe/errors.hpp"

namespace tapdoe {

std::string format_sig9(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string flux_to_csv(const FluxSeries& flux) {
  std::string out = "time_s";
  for (const auto& g : flux.gases) out += "," + g;
  out += "\n";
  for (std::size_t t = 0; t < flux.time.size(); ++t) {
    out += format_sig9(flux.time[t]);
    for (Eigen::Index g = 0; g < flux.values.cols(); ++g) {
      out += "," + format_sig9(flux.values(static_cast<Eigen::Index>(t), g));
    }
    out += "\n";
  }
  return out;
}

FluxSeries flux_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("flux CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header[0] != "time_s") throw InputError("flux CSV header must start with time_s");
  FluxSeries flux;
  flux.gases.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("flux CSV line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
      }
    }
    if (row.size() != header.size()) {
      throw InputError("flux CSV line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                       " columns, expected " + std::to_string(header.size()));
    }
    rows.push_back(std::move(row));
  }
  flux.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(flux.gases.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    flux.time.push_back(rows[r][0]);
    for (std::size_t g = 0; g < flux.gases.size(); ++g) {
      flux.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(g)) = rows[r][g + 1];
    }
  }
  return flux;
}

void write_flux_csv(const std::filesystem::path& path, const FluxSeries& flux) { write_text(path, flux_to_csv(flux)); }

FluxSeries read_flux_csv(const std::filesystem::path& path) {
  try {
    return flux_from_csv(read_text(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void Manifest::add(const std::string& relative, const std::string& text, const std::string& description) {
  write_text(root_ / relative, text);
  entries_.push_back({relative, description, text.size()});
}

void Manifest::write(const std::string& command, std::uint64_t seed) const {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  doc["seed"] = seed;
  auto& files = doc["files"] = nlohmann::ordered_json::array();
  for (const auto& e : entries_) files.push_back({{"path", e.path}, {"description", e.description}, {"bytes", e.bytes}});
  write_text(root_ / "manifest.json", doc.dump(2) + "\n");
}

}  // namespace tapdoe

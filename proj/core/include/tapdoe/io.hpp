#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tapdoe/reactor.hpp"

namespace tapdoe {

/// Shortest form with 9 significant digits ("%.9g").
std::string format_sig9(double value);

/// `time_s,<gas1>,...` header, one row per time point.
std::string flux_to_csv(const FluxSeries& flux);
FluxSeries flux_from_csv(const std::string& text);
void write_flux_csv(const std::filesystem::path& path, const FluxSeries& flux);
FluxSeries read_flux_csv(const std::filesystem::path& path);

/// Write a file, creating parent directories; InputError with the path on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Records every file a command writes; `write` emits manifest.json into the output root.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path root) : root_(std::move(root)) {}
  /// Write `text` to root/relative and record it.
  void add(const std::string& relative, const std::string& text, const std::string& description);
  void write(const std::string& command, std::uint64_t seed) const;
  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  struct Entry {
    std::string path;
    std::string description;
    std::size_t bytes;
  };
  std::filesystem::path root_;
  std::vector<Entry> entries_;
};

}  // namespace tapdoe

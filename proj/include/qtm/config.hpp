#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qtm/simulation.hpp"
#include "qtm/sweep.hpp"
#include "qtm/units.hpp"

namespace qtm {

/// Sectioned key = value text. '#' and ';' start comments, keys are unique
/// per section, and every lookup error carries the source line.
class IniDocument {
 public:
  static IniDocument parse(std::string_view text, std::string source = "<string>");
  static IniDocument load(const std::filesystem::path& path);

  const std::string& source() const { return source_; }
  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  std::optional<std::string> string(const std::string& section, const std::string& key) const;
  std::optional<double> number(const std::string& section, const std::string& key) const;
  std::optional<std::size_t> count(const std::string& section, const std::string& key) const;
  std::optional<std::vector<std::string>> list(const std::string& section, const std::string& key) const;
  std::optional<std::vector<double>> numbers(const std::string& section, const std::string& key) const;

  /// Throws ConfigError naming the first key never read.
  void reject_unused() const;
  /// Throws ConfigError naming the first section outside `allowed`.
  void restrict_sections(const std::vector<std::string>& allowed) const;

  /// "source:line: message" for a key (or the section header if key is empty).
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& message) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };
  const Entry* find(const std::string& section, const std::string& key) const;

  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

struct SnapshotRequest {
  bool at_peak = false;
  double time = 0.0;

  bool operator==(const SnapshotRequest&) const = default;
};

struct RunConfig {
  std::string name = "run";
  Scenario scenario;
  double echo_threshold = 0.2;
  std::string output_dir;  // empty: use QTM_OUT or the default
  std::vector<SnapshotRequest> snapshots;
};

struct SweepConfig {
  RunConfig run;
  SweepAxis axis1;
  SweepAxis axis2;
  std::size_t workers = 1;

  SweepPlan plan() const;
};

struct LabConfig {
  units::LabContext context;
  std::vector<double> lambdas;
};

RunConfig parse_run_config(std::string_view text, std::string source = "<string>");
RunConfig load_run_config(const std::filesystem::path& path);
SweepConfig parse_sweep_config(std::string_view text, std::string source = "<string>");
SweepConfig load_sweep_config(const std::filesystem::path& path);
LabConfig parse_lab_config(std::string_view text, std::string source = "<string>");
LabConfig load_lab_config(const std::filesystem::path& path);

/// Canonical text form; parsing it reproduces the configuration exactly
/// (numbers are written in shortest round-trip form). The sweep dump omits
/// the worker count, which does not affect results.
std::string dump(const RunConfig& config);
std::string dump(const SweepConfig& config);
std::string dump(const LabConfig& config);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string config_hash(std::string_view text);

/// Lines for an artifact header: code version, then the dump line by line.
std::vector<std::string> artifact_header(const std::string& dump_text);

const char* code_version();

}  // namespace qtm

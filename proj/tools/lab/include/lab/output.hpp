#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "lab/config.hpp"

namespace lab {

/// Output root: $ENIF_LAB_OUTPUT if set, otherwise ./enif-lab-output.
std::filesystem::path output_root();

/// Plot-ready table with a header row.
class CsvTable {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit CsvTable(std::vector<std::string> columns);

  void add(std::vector<Cell> row);
  std::size_t rows() const noexcept { return rows_.size(); }
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

struct DeskScale {
  std::string parameter;
  std::string reference_value;
  std::string used_value;
};

/// Where an experiment writes. A sink without a directory discards everything, which is how
/// tests run experiments without touching the file system.
class Sink {
 public:
  Sink() = default;
  explicit Sink(std::filesystem::path dir);

  bool enabled() const noexcept { return dir_.has_value(); }
  const std::optional<std::filesystem::path>& dir() const noexcept { return dir_; }

  void table(const std::string& name, const CsvTable& t);
  void matrix(const std::string& name, const Eigen::MatrixXd& m);
  /// Any text artefact produced by a writer callback.
  void text(const std::string& name, const std::function<void(std::ostream&)>& writer);

  void seed(const std::string& task, std::uint64_t value);
  void timing(const std::string& stage, double seconds);
  void desk_scale(DeskScale note);

  /// Manifest: config echo, library version, seeds, timings, desk-scale substitutions, files.
  void write_manifest(const std::string& experiment, const Json& config) const;

 private:
  std::filesystem::path file(const std::string& name);

  std::optional<std::filesystem::path> dir_;
  std::vector<std::string> files_;
  Json seeds_ = Json::object();
  Json timings_ = Json::object();
  std::vector<DeskScale> desk_;
};

/// Wall-clock stopwatch reporting into a sink on destruction.
class ScopedTimer {
 public:
  ScopedTimer(Sink& sink, std::string stage);
  ~ScopedTimer();
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  Sink& sink_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace lab

#include "lab/output.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>

#include "enif/ensemble.hpp"
#include "enif/version.hpp"

namespace lab {

namespace fs = std::filesystem;

fs::path output_root() {
  if (const char* env = std::getenv("ENIF_LAB_OUTPUT"); env != nullptr && *env != '\0') return env;
  return "enif-lab-output";
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add(std::vector<Cell> row) {
  check(row.size() == columns_.size(), "table row has the wrong number of cells");
  rows_.push_back(std::move(row));
}

void CsvTable::write(const fs::path& path) const {
  std::ofstream out(path);
  if (!out) enif::fail(enif::ErrorCode::io_error, "cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t j = 0; j < columns_.size(); ++j) out << (j ? "," : "") << columns_[j];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      std::visit([&](const auto& v) { out << v; }, row[j]);
    }
    out << '\n';
  }
}

Sink::Sink(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(*dir_, ec);
  if (ec) enif::fail(enif::ErrorCode::io_error, "cannot create " + dir_->string() + ": " + ec.message());
}

fs::path Sink::file(const std::string& name) {
  files_.push_back(name);
  return *dir_ / name;
}

void Sink::table(const std::string& name, const CsvTable& t) {
  if (dir_) t.write(file(name));
}

void Sink::matrix(const std::string& name, const Eigen::MatrixXd& m) {
  if (dir_) enif::save_matrix_csv(file(name), m);
}

void Sink::text(const std::string& name, const std::function<void(std::ostream&)>& writer) {
  if (!dir_) return;
  const fs::path path = file(name);
  std::ofstream out(path);
  if (!out) enif::fail(enif::ErrorCode::io_error, "cannot write " + path.string());
  out << std::setprecision(17);
  writer(out);
}

void Sink::seed(const std::string& task, std::uint64_t value) { seeds_[task] = value; }

void Sink::timing(const std::string& stage, double seconds) {
  timings_[stage] = timings_.value(stage, 0.0) + seconds;
}

void Sink::desk_scale(DeskScale note) { desk_.push_back(std::move(note)); }

void Sink::write_manifest(const std::string& experiment, const Json& config) const {
  if (!dir_) return;
  Json m;
  m["experiment"] = experiment;
  m["version"] = enif::version;
  m["config"] = config;
  m["seeds"] = seeds_;
  m["timings_seconds"] = timings_;
  Json desk = Json::array();
  for (const DeskScale& d : desk_) {
    desk.push_back({{"parameter", d.parameter}, {"reference", d.reference_value}, {"used", d.used_value}});
  }
  m["desk_scale"] = desk;
  m["files"] = files_;
  std::ofstream out(*dir_ / "manifest.json");
  if (!out) enif::fail(enif::ErrorCode::io_error, "cannot write manifest in " + dir_->string());
  out << m.dump(2) << '\n';
}

ScopedTimer::ScopedTimer(Sink& sink, std::string stage)
    : sink_(sink), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}

ScopedTimer::~ScopedTimer() {
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
  sink_.timing(stage_, elapsed.count());
}

}  // namespace lab

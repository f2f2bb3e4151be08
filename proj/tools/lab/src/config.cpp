#include "lab/config.hpp"

#include <fstream>

namespace lab {

ParamReader::ParamReader(const Json& object, std::string section) : section_(std::move(section)) {
  if (object.is_null()) {
    object_ = Json::object();
  } else if (!object.is_object()) {
    enif::fail(enif::ErrorCode::parse_error, section_ + " must be a JSON object");
  } else {
    object_ = object;
  }
}

void ParamReader::finish() const {
  for (const auto& [key, value] : object_.items()) {
    if (!seen_.contains(key)) enif::fail(enif::ErrorCode::parse_error, "unknown key " + section_ + "." + key);
  }
}

Json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) enif::fail(enif::ErrorCode::io_error, "cannot open config " + path.string());
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    enif::fail(enif::ErrorCode::parse_error, path.string() + ": " + e.what());
  }
}

void check(bool condition, const std::string& what) {
  if (!condition) enif::fail(enif::ErrorCode::invalid_argument, what);
}

}  // namespace lab

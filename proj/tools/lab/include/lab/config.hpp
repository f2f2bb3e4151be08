#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "enif/error.hpp"

namespace lab {

using Json = nlohmann::ordered_json;

/// Reads one JSON object with defaults, remembering every key it was asked for.
///
/// `finish()` rejects keys nobody read (typos in a config must not be silently ignored) and
/// `resolved()` is the object with defaults filled in, which the manifest echoes.
class ParamReader {
 public:
  ParamReader(const Json& object, std::string section);

  template <class T>
  T get(const std::string& key, const T& fallback) {
    seen_.insert(key);
    T value = fallback;
    if (object_.contains(key) && !object_.at(key).is_null()) {
      try {
        value = object_.at(key).get<T>();
      } catch (const nlohmann::json::exception& e) {
        enif::fail(enif::ErrorCode::parse_error, section_ + "." + key + ": " + e.what());
      }
    }
    resolved_[key] = value;
    return value;
  }

  /// Throws ParseError on unread keys.
  void finish() const;
  const Json& resolved() const noexcept { return resolved_; }
  const std::string& section() const noexcept { return section_; }

 private:
  Json object_;
  std::string section_;
  std::set<std::string> seen_;
  Json resolved_ = Json::object();
};

/// Parses a config file; JSON syntax errors become ParseError, a missing file IoError.
Json load_config(const std::filesystem::path& path);

void check(bool condition, const std::string& what);

}  // namespace lab

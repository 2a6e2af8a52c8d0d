// Strict JSON object reader: every key must be consumed or finish() throws
// InvalidConfig naming the stray key.
#pragma once

#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "agsynth/error.hpp"

namespace agsynth::detail {

class FieldReader {
 public:
  FieldReader(const nlohmann::json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object())
      throw Error(ErrorCode::kInvalidConfig, where_ + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const nlohmann::json& raw(const std::string& key) {
    if (!j_.contains(key))
      throw Error(ErrorCode::kInvalidConfig, "missing required key '" + path(key) + "'");
    seen_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  bool get(const std::string& key, T& out) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::kInvalidConfig, "wrong type for key '" + path(key) + "'");
    }
    return true;
  }

  template <typename T>
  void require(const std::string& key, T& out) {
    if (!get(key, out))
      throw Error(ErrorCode::kInvalidConfig, "missing required key '" + path(key) + "'");
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key))
        throw Error(ErrorCode::kInvalidConfig, "unknown key '" + path(key) + "'");
  }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace agsynth::detail

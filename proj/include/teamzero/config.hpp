// Copyright 2026 The teamzero Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-oriented "key = value" configuration files. '#' starts a comment.
// Every key must be consumed by the reader; leftovers are reported as
// unknown fields so typos fail loudly before any work starts.

#ifndef TEAMZERO_CONFIG_HPP_
#define TEAMZERO_CONFIG_HPP_

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "teamzero/diversity.hpp"

namespace teamzero {

class KeyValueConfig {
 public:
  static KeyValueConfig Parse(const std::string& text,
                              const std::string& origin = "<config>") {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      const std::string trimmed = Trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": expected 'key = value'");
      }
      const std::string key = Trim(trimmed.substr(0, eq));
      const std::string value = Trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": empty key");
      }
      if (!cfg.values_.emplace(key, value).second) {
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": duplicate key '" + key + "'");
      }
    }
    return cfg;
  }

  static KeyValueConfig Load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return Parse(buf.str(), path);
  }

  bool Has(const std::string& key) const { return values_.count(key) > 0; }

  void Set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }

  std::string GetString(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double GetDouble(const std::string& key, double fallback) {
    const std::string raw = GetString(key, "");
    if (!Has(key)) return fallback;
    double x = 0.0;
    if (!ParseNumber(raw, x)) throw FieldError(key, raw, "a real number");
    return x;
  }

  std::int64_t GetInt(const std::string& key, std::int64_t fallback) {
    const std::string raw = GetString(key, "");
    if (!Has(key)) return fallback;
    std::int64_t x = 0;
    if (!ParseNumber(raw, x)) throw FieldError(key, raw, "an integer");
    return x;
  }

  std::uint64_t GetUint(const std::string& key, std::uint64_t fallback) {
    const std::string raw = GetString(key, "");
    if (!Has(key)) return fallback;
    std::uint64_t x = 0;
    if (!ParseNumber(raw, x)) throw FieldError(key, raw, "a non-negative integer");
    return x;
  }

  bool GetBool(const std::string& key, bool fallback) {
    const std::string raw = GetString(key, "");
    if (!Has(key)) return fallback;
    if (raw == "true" || raw == "1") return true;
    if (raw == "false" || raw == "0") return false;
    throw FieldError(key, raw, "true or false");
  }

  // Comma-separated integers, e.g. "64,64".
  std::vector<int> GetIntList(const std::string& key,
                              const std::vector<int>& fallback) {
    const std::string raw = GetString(key, "");
    if (!Has(key)) return fallback;
    std::vector<int> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::int64_t x = 0;
      if (!ParseNumber(Trim(item), x)) {
        throw FieldError(key, raw, "a comma-separated integer list");
      }
      out.push_back(static_cast<int>(x));
    }
    return out;
  }

  // Throws on keys that no reader asked for.
  void CheckAllUsed() const {
    std::string unknown;
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty()) throw ConfigError("unknown config field(s): " + unknown);
  }

 private:
  static std::string Trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  template <typename T>
  static bool ParseNumber(const std::string& raw, T& out) {
    if (raw.empty()) return false;
    if constexpr (std::is_floating_point_v<T>) {
      char* end = nullptr;
      out = std::strtod(raw.c_str(), &end);
      return end == raw.c_str() + raw.size();
    } else {
      const auto [ptr, ec] =
          std::from_chars(raw.data(), raw.data() + raw.size(), out);
      return ec == std::errc() && ptr == raw.data() + raw.size();
    }
  }

  static ConfigError FieldError(const std::string& key, const std::string& raw,
                                const std::string& expected) {
    return ConfigError("config field '" + key + "': expected " + expected +
                       ", got '" + raw + "'");
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

}  // namespace teamzero

#endif  // TEAMZERO_CONFIG_HPP_

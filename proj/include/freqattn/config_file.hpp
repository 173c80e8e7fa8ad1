/* Copyright 2026 The freqattn Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqattn {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Flat `key = value` file; '#' starts a comment. Keys are kept sorted so the
// canonical text (and its hash) does not depend on line order.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& is) {
    KeyValueConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": empty key");
      }
      if (cfg.values_.count(key)) {
        throw std::invalid_argument("config: duplicate key " + key);
      }
      cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
  }

  static KeyValueConfig parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path);
    return parse(is);
  }

  bool has(const std::string& key) const { return values_.count(key); }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::size_t get_count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = values_.at(key);
    std::size_t pos = 0;
    long long n = 0;
    try {
      n = std::stoll(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != v.size() || n < 0) {
      throw std::invalid_argument("config: " + key + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(n);
  }

  double get_real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const std::string v = values_.at(key);
    std::size_t pos = 0;
    double d = 0.0;
    try {
      d = std::stod(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != v.size()) throw std::invalid_argument("config: " + key + " must be a number");
    return d;
  }

  std::vector<double> get_reals(const std::string& key,
                                const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(values_.at(key))) {
      KeyValueConfig tmp;
      tmp.set(key, item);
      out.push_back(tmp.get_real(key, 0.0));
    }
    return out;
  }

  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// 64-bit FNV-1a, used for stable config fingerprints in reports.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace freqattn

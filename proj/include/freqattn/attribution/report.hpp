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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqattn/attribution/alti.hpp"
#include "freqattn/config_file.hpp"

namespace freqattn::attribution {

inline std::string format_sig9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// CSV with header "out\in,0,...,N-1"; each row starts with its output index.
inline std::string contribution_csv(const ContributionMatrix& c) {
  std::ostringstream os;
  os << "out\\in";
  for (std::size_t j = 0; j < c.size(); ++j) os << ',' << j;
  os << '\n';
  for (std::size_t i = 0; i < c.size(); ++i) {
    os << i;
    for (std::size_t j = 0; j < c.size(); ++j) os << ',' << format_sig9(c.at(i, j));
    os << '\n';
  }
  return os.str();
}

// Character heatmap scaled to the largest cell, plus column masses.
inline std::string contribution_heatmap(const ContributionMatrix& c) {
  static const std::string ramp = " .:-=+*#%@";
  double mx = 0.0;
  for (double v : c.values.data()) mx = std::max(mx, v);
  std::ostringstream os;
  os << "rows: output tokens, columns: input tokens, max cell "
     << format_sig9(mx) << "\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    char label[16];
    std::snprintf(label, sizeof(label), "%3zu |", i);
    os << label;
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double r = mx > 0.0 ? c.at(i, j) / mx : 0.0;
      const auto k = std::min(ramp.size() - 1,
                              static_cast<std::size_t>(r * static_cast<double>(ramp.size() - 1) + 0.5));
      os << ramp[k];
    }
    os << (c.degenerate_rows.at(i) ? "|  (degenerate row)\n" : "|\n");
  }
  os << "column mass:";
  for (std::size_t j = 0; j < c.size(); ++j) os << ' ' << format_sig9(c.column_mass(j));
  os << '\n';
  return os.str();
}

// Writes `csv_path` and a heatmap next to it (<csv_path>.heatmap.txt).
inline void emit_contribution_report(const ContributionMatrix& c,
                                     const std::string& csv_path) {
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open " + csv_path + " for writing");
  csv << contribution_csv(c);
  std::ofstream heat(csv_path + ".heatmap.txt", std::ios::binary);
  if (!heat) throw std::runtime_error("cannot write heatmap for " + csv_path);
  heat << contribution_heatmap(c);
  if (!csv || !heat) throw std::runtime_error("I/O failure writing " + csv_path);
}

inline ContributionMatrix parse_contribution_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("out\\in", 0) != 0) {
    throw std::runtime_error("contribution csv: missing header");
  }
  const std::size_t n = split_list(line).size() - 1;
  ContributionMatrix c{Tensor({n, n}), std::vector<bool>(n, false)};
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw std::runtime_error("contribution csv: truncated");
    const auto cells = split_list(line);
    if (cells.size() != n + 1) throw std::runtime_error("contribution csv: bad row");
    for (std::size_t j = 0; j < n; ++j) c.values.at(i, j) = std::stod(cells[j + 1]);
  }
  return c;
}

}  // namespace freqattn::attribution

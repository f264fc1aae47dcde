// Copyright 2026 the arep authors.
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

#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "arep/stats.hpp"

namespace arep {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

using CsvField = std::variant<long, double, std::string>;

/// Minimal deterministic CSV emitter: '.' decimal, LF endings, %.17g doubles.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void comment(const std::string& line) { os_ << "# " << line << "\n"; }

  void header(const std::vector<std::string>& cols) { row_of_strings(cols); }

  void row(const std::vector<CsvField>& fields) {
    std::vector<std::string> cells;
    cells.reserve(fields.size());
    for (const auto& f : fields) {
      if (std::holds_alternative<long>(f))
        cells.push_back(std::to_string(std::get<long>(f)));
      else if (std::holds_alternative<double>(f))
        cells.push_back(format_double(std::get<double>(f)));
      else
        cells.push_back(std::get<std::string>(f));
    }
    row_of_strings(cells);
  }

 private:
  void row_of_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }
  std::ostream& os_;
};

}  // namespace arep

// Copyright 2026 The prpmine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace prpmine {

/// Malformed input file; `line` is 1-based, 0 when unknown.
class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::invalid_argument(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;  ///< line on which the record starts
};

/// RFC 4180 reader: comma separated, optional double quotes with "" escapes,
/// LF or CRLF line ends, quoted fields may span lines. Blank lines are skipped.
std::vector<CsvRecord> parse_csv(std::string_view text);

/// Field quoted when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace prpmine

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

#include "prpmine/csv.hpp"

namespace prpmine {

std::vector<CsvRecord> parse_csv(std::string_view text) {
    std::vector<CsvRecord> records;
    CsvRecord current;
    std::string field;
    std::size_t line = 1;
    std::size_t i = 0;
    bool record_started = false;
    const std::size_t n = text.size();
    if (n >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

    auto end_record = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        const bool blank = current.fields.size() == 1 && current.fields[0].empty();
        if (!blank) records.push_back(std::move(current));
        current = CsvRecord{};
        record_started = false;
    };

    while (i < n) {
        if (!record_started) {
            current.line = line;
            record_started = true;
        }
        const char c = text[i];
        if (c == '"') {
            if (!field.empty()) throw ParseError("quote inside unquoted field", line);
            const std::size_t start_line = line;
            ++i;
            for (;;) {
                if (i >= n) throw ParseError("unterminated quoted field", start_line);
                if (text[i] == '"') {
                    if (i + 1 < n && text[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                if (text[i] == '\n') ++line;
                field.push_back(text[i++]);
            }
            if (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                throw ParseError("unexpected character after closing quote", line);
            }
            continue;
        }
        if (c == ',') {
            current.fields.push_back(std::move(field));
            field.clear();
            ++i;
        } else if (c == '\r' || c == '\n') {
            i += (c == '\r' && i + 1 < n && text[i + 1] == '\n') ? 2 : 1;
            end_record();
            ++line;
        } else {
            field.push_back(c);
            ++i;
        }
    }
    if (record_started) end_record();
    return records;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t j = 0; j < fields.size(); ++j) {
        if (j) out << ',';
        out << csv_escape(fields[j]);
    }
    out << '\n';
}

}  // namespace prpmine

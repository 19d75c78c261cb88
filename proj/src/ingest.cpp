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

#include "prpmine/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "prpmine/random.hpp"

namespace prpmine {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kFields = {"id", "name", "category", "price", "avg_rating", "num_ratings", "permissions"};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw std::invalid_argument(std::string(text));
    return value;
}

std::vector<std::string> split_permissions(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(sep, start), text.size());
        const auto name = trim(text.substr(start, end - start));
        if (!name.empty()) out.emplace_back(name);
        start = end + 1;
    }
    return out;
}

/// Source column name -> schema field, honouring the mapping.
std::map<std::string, std::string> inverse_mapping(const ColumnMapping& mapping) {
    std::map<std::string, std::string> source_to_field;
    for (const auto& field : kFields) {
        const auto it = mapping.columns.find(field);
        source_to_field[it == mapping.columns.end() ? field : it->second] = field;
    }
    for (const auto& [field, source] : mapping.columns) {
        if (std::find(kFields.begin(), kFields.end(), field) == kFields.end()) {
            throw ConfigError("column mapping: unknown schema field '" + field + "'");
        }
    }
    return source_to_field;
}

bool is_ignored(const ColumnMapping& mapping, const std::string& column) {
    return std::find(mapping.ignored.begin(), mapping.ignored.end(), column) != mapping.ignored.end();
}

/// Fills one schema field of `app` from its textual value.
void set_field(App& app, const std::string& field, std::string_view value, char sep) {
    if (field == "id") {
        app.id = std::string(trim(value));
    } else if (field == "name") {
        app.name = std::string(value);
    } else if (field == "category") {
        app.category = std::string(trim(value));
    } else if (field == "price") {
        app.price = parse_number<double>(value).value_or(0.0);
    } else if (field == "avg_rating") {
        app.avg_rating = parse_number<double>(value);
    } else if (field == "num_ratings") {
        app.num_ratings = parse_number<std::int64_t>(value).value_or(0);
    } else if (field == "permissions") {
        app.permissions = split_permissions(value, sep);
    }
}

void check_app(const App& app) {
    if (app.id.empty()) throw std::invalid_argument("empty app id");
    if (!(app.price >= 0.0) || !std::isfinite(app.price)) throw std::invalid_argument("price must be non-negative");
    if (app.avg_rating && !(*app.avg_rating >= 1.0 && *app.avg_rating <= 5.0)) {
        throw std::invalid_argument("average rating must lie in [1, 5]");
    }
    if (app.num_ratings < 0) throw std::invalid_argument("rating count must be non-negative");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open input file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_number(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

}  // namespace

BinaryMatrix Dataset::matrix() const {
    std::vector<std::size_t> all(apps.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return matrix(all);
}

BinaryMatrix Dataset::matrix(std::span<const std::size_t> rows) const {
    std::unordered_map<std::string, Eigen::Index> column;
    for (std::size_t d = 0; d < vocabulary.size(); ++d) column[vocabulary[d]] = static_cast<Eigen::Index>(d);
    BitMatrix bits = BitMatrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(vocabulary.size()));
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const App& app = apps.at(rows[i]);
        for (const auto& p : app.permissions) bits(static_cast<Eigen::Index>(i), column.at(p)) = 1;
        ids.push_back(app.id);
    }
    return BinaryMatrix(std::move(bits), std::move(ids), vocabulary);
}

std::vector<std::string> Dataset::categories(std::span<const std::size_t> rows) const {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (std::size_t i : rows) out.push_back(apps.at(i).category);
    return out;
}

Format parse_format(std::string_view name) {
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    throw ConfigError("unknown input format '" + std::string(name) + "' (expected csv or json)");
}

ColumnMapping ColumnMapping::from_json_file(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError("column mapping " + path.string() + ": " + e.what(), 0);
    }
    ColumnMapping m;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "columns") {
                m.columns = value.get<std::map<std::string, std::string>>();
            } else if (key == "ignore") {
                m.ignored = value.get<std::vector<std::string>>();
            } else if (key == "permission_separator") {
                const auto sep = value.get<std::string>();
                if (sep.size() != 1) throw ConfigError("column mapping: permission_separator must be one character");
                m.permission_separator = sep[0];
            } else {
                throw ConfigError("column mapping: unknown key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("column mapping " + path.string() + ": " + e.what());
    }
    inverse_mapping(m);
    return m;
}

Dataset make_dataset(std::vector<App> apps) {
    Dataset ds;
    std::unordered_set<std::string> ids;
    std::set<std::string> vocabulary;
    for (auto& app : apps) {
        check_app(app);
        if (!ids.insert(app.id).second) throw std::invalid_argument("duplicate app id '" + app.id + "'");
        std::sort(app.permissions.begin(), app.permissions.end());
        app.permissions.erase(std::unique(app.permissions.begin(), app.permissions.end()), app.permissions.end());
        vocabulary.insert(app.permissions.begin(), app.permissions.end());
        if (!app.avg_rating) {
            app.num_ratings = 0;
            ds.missing_rating_ids.push_back(app.id);
        }
    }
    ds.apps = std::move(apps);
    ds.vocabulary.assign(vocabulary.begin(), vocabulary.end());
    return ds;
}

Dataset parse_dataset_csv(std::string_view text, const ColumnMapping& mapping) {
    const auto records = parse_csv(text);
    if (records.empty()) throw ParseError("missing header", 1);
    const auto source_to_field = inverse_mapping(mapping);

    const CsvRecord& header = records.front();
    std::vector<std::string> field_of_column;
    std::set<std::string> seen;
    for (const auto& raw : header.fields) {
        const std::string column(trim(raw));
        const auto it = source_to_field.find(column);
        if (it == source_to_field.end()) {
            if (!is_ignored(mapping, column)) throw ParseError("unknown column '" + column + "'", header.line);
            field_of_column.emplace_back();
            continue;
        }
        if (!seen.insert(it->second).second) throw ParseError("column '" + column + "' appears twice", header.line);
        field_of_column.push_back(it->second);
    }
    for (const char* required : {"id", "permissions"}) {
        if (!seen.count(required)) throw ParseError(std::string("missing required column '") + required + "'", header.line);
    }

    std::vector<App> apps;
    std::unordered_map<std::string, std::size_t> line_of_id;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const CsvRecord& rec = records[r];
        if (rec.fields.size() != field_of_column.size()) {
            throw ParseError("expected " + std::to_string(field_of_column.size()) + " fields, found " +
                                 std::to_string(rec.fields.size()),
                             rec.line);
        }
        App app;
        std::string current;
        try {
            for (std::size_t c = 0; c < rec.fields.size(); ++c) {
                current = field_of_column[c];
                if (!current.empty()) set_field(app, current, rec.fields[c], mapping.permission_separator);
            }
            current.clear();
            check_app(app);
        } catch (const std::invalid_argument& e) {
            throw ParseError(current.empty() ? e.what() : "bad value for '" + current + "': " + e.what(), rec.line);
        }
        if (!line_of_id.emplace(app.id, rec.line).second) {
            throw ParseError("duplicate app id '" + app.id + "' (first seen on line " +
                                 std::to_string(line_of_id[app.id]) + ")",
                             rec.line);
        }
        apps.push_back(std::move(app));
    }
    return make_dataset(std::move(apps));
}

Dataset parse_dataset_json(std::string_view text, const ColumnMapping& mapping) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), 0);
    }
    if (!j.is_array()) throw ParseError("JSON dataset must be an array of objects", 0);
    const auto source_to_field = inverse_mapping(mapping);
    std::vector<App> apps;
    std::unordered_set<std::string> ids;
    for (std::size_t r = 0; r < j.size(); ++r) {
        const json& obj = j[r];
        const std::string where = "record " + std::to_string(r + 1);
        if (!obj.is_object()) throw ParseError(where + " is not an object", 0);
        App app;
        for (const auto& [key, value] : obj.items()) {
            const auto it = source_to_field.find(key);
            if (it == source_to_field.end()) {
                if (!is_ignored(mapping, key)) throw ParseError(where + ": unknown column '" + key + "'", 0);
                continue;
            }
            const std::string& field = it->second;
            try {
                if (value.is_null()) {
                    set_field(app, field, "", mapping.permission_separator);
                } else if (field == "permissions" && value.is_array()) {
                    app.permissions = value.get<std::vector<std::string>>();
                } else if (value.is_string()) {
                    set_field(app, field, value.get<std::string>(), mapping.permission_separator);
                } else if (value.is_number()) {
                    if (field == "num_ratings") {
                        if (!value.is_number_integer()) throw std::invalid_argument("expected an integer");
                        app.num_ratings = value.get<std::int64_t>();
                    } else if (field == "price") {
                        app.price = value.get<double>();
                    } else if (field == "avg_rating") {
                        app.avg_rating = value.get<double>();
                    } else {
                        set_field(app, field, value.dump(), mapping.permission_separator);
                    }
                } else {
                    throw std::invalid_argument("unsupported JSON type");
                }
            } catch (const std::exception& e) {
                throw ParseError(where + ": bad value for '" + field + "': " + e.what(), 0);
            }
        }
        try {
            check_app(app);
        } catch (const std::invalid_argument& e) {
            throw ParseError(where + ": " + e.what(), 0);
        }
        if (!ids.insert(app.id).second) throw ParseError(where + ": duplicate app id '" + app.id + "'", 0);
        apps.push_back(std::move(app));
    }
    return make_dataset(std::move(apps));
}

Dataset load_dataset(const std::filesystem::path& path, Format format, const ColumnMapping& mapping) {
    const std::string text = read_file(path);
    try {
        return format == Format::csv ? parse_dataset_csv(text, mapping) : parse_dataset_json(text, mapping);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
    write_csv_row(out, kFields);
    for (const App& app : ds.apps) {
        std::string perms;
        for (std::size_t j = 0; j < app.permissions.size(); ++j) {
            if (j) perms += ';';
            perms += app.permissions[j];
        }
        write_csv_row(out, {app.id, app.name, app.category, format_number(app.price),
                            app.avg_rating ? format_number(*app.avg_rating) : "", std::to_string(app.num_ratings),
                            perms});
    }
}

Dataset dataset_from_matrix(const BinaryMatrix& x, std::vector<std::string> names) {
    if (names.empty()) {
        for (Eigen::Index d = 0; d < x.cols(); ++d) names.push_back("p" + std::to_string(d));
    }
    if (static_cast<Eigen::Index>(names.size()) != x.cols()) throw DimensionError("dataset_from_matrix: name count != D");
    std::vector<App> apps;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        App app;
        app.id = "app" + std::to_string(i);
        app.name = app.id;
        app.category = "none";
        app.avg_rating = 4.5;
        app.num_ratings = 1000;
        for (Eigen::Index d = 0; d < x.cols(); ++d) {
            if (x(i, d)) app.permissions.push_back(names[static_cast<std::size_t>(d)]);
        }
        apps.push_back(std::move(app));
    }
    return make_dataset(std::move(apps));
}

void ReputationCriteria::validate() const {
    if (!(min_rating >= 0.0)) throw ConfigError("reputation: min rating must be non-negative");
    if (min_ratings < 0 || low_max_ratings < 0) throw ConfigError("reputation: rating counts must be non-negative");
    if (low_max_ratings > min_ratings) {
        throw ConfigError("reputation: low-reputation bound exceeds the high-reputation count threshold");
    }
}

namespace {
bool is_high(const App& app, const ReputationCriteria& c) {
    return app.avg_rating && *app.avg_rating >= c.min_rating && app.num_ratings >= c.min_ratings;
}
}  // namespace

std::size_t count_high_reputation(const Dataset& ds, const ReputationCriteria& criteria) {
    return static_cast<std::size_t>(
        std::count_if(ds.apps.begin(), ds.apps.end(), [&](const App& a) { return is_high(a, criteria); }));
}

std::size_t auto_test_size(std::size_t high_reputation_count) {
    return (high_reputation_count + 3) / 6;
}

ReputationSplit filter_reputation(const Dataset& ds, const ReputationCriteria& criteria) {
    criteria.validate();
    std::vector<std::size_t> high;
    ReputationSplit out;
    for (std::size_t i = 0; i < ds.apps.size(); ++i) {
        const App& app = ds.apps[i];
        if (app.num_ratings < criteria.low_max_ratings) {
            out.test_low.push_back(i);
        } else if (is_high(app, criteria)) {
            high.push_back(i);
        }
    }
    if (criteria.test_size > high.size()) {
        throw ConfigError("reputation: test size " + std::to_string(criteria.test_size) + " exceeds the " +
                          std::to_string(high.size()) + " high-reputation apps");
    }
    Rng rng(criteria.seed);
    shuffle(high, rng);
    out.test_high.assign(high.begin(), high.begin() + static_cast<std::ptrdiff_t>(criteria.test_size));
    out.train.assign(high.begin() + static_cast<std::ptrdiff_t>(criteria.test_size), high.end());
    std::sort(out.test_high.begin(), out.test_high.end());
    std::sort(out.train.begin(), out.train.end());
    return out;
}

SummaryStats summary_stats(const Dataset& ds, std::size_t top_n) {
    SummaryStats s;
    s.apps = ds.apps.size();
    const double n = static_cast<double>(std::max<std::size_t>(1, ds.apps.size()));

    std::map<std::string, std::int64_t> counts;
    for (const auto& name : ds.vocabulary) counts[name] = 0;
    for (const App& app : ds.apps) {
        for (const auto& p : app.permissions) ++counts[p];
    }
    for (const auto& [name, c] : counts) s.frequencies.push_back({name, c, static_cast<double>(c) / n});
    std::stable_sort(s.frequencies.begin(), s.frequencies.end(),
                     [](const auto& a, const auto& b) { return a.count > b.count; });
    if (s.frequencies.size() > top_n) s.frequencies.resize(top_n);

    std::map<double, std::int64_t> prices;
    for (const App& app : ds.apps) ++prices[app.price];
    std::int64_t running = 0;
    for (const auto& [price, c] : prices) {
        running += c;
        s.prices.push_back({price, c, static_cast<double>(running) / n});
    }

    for (int b = 0; b < 8; ++b) s.rating_histogram.push_back({1.0 + 0.5 * b, 1.5 + 0.5 * b, 0});
    std::int64_t max_count = 0;
    for (const App& app : ds.apps) {
        if (app.num_ratings < 1 || !app.avg_rating) continue;
        s.ratings.push_back({app.id, *app.avg_rating, app.num_ratings});
        const int b = std::clamp(static_cast<int>(std::floor((*app.avg_rating - 1.0) / 0.5)), 0, 7);
        ++s.rating_histogram[static_cast<std::size_t>(b)].count;
        max_count = std::max(max_count, app.num_ratings);
    }
    for (double lower = 1.0; lower <= static_cast<double>(max_count); lower *= 10.0) {
        s.count_histogram.push_back({lower, lower * 10.0, 0});
    }
    for (const RatingRow& row : s.ratings) {
        const auto b = static_cast<std::size_t>(std::floor(std::log10(static_cast<double>(row.num_ratings))));
        ++s.count_histogram[std::min(b, s.count_histogram.size() - 1)].count;
    }
    return s;
}

}  // namespace prpmine

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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prpmine/binary_matrix.hpp"
#include "prpmine/csv.hpp"

namespace prpmine {

struct App {
    std::string id;
    std::string name;
    std::string category;
    double price = 0.0;
    std::optional<double> avg_rating;  ///< in [1, 5] when present
    std::int64_t num_ratings = 0;
    std::vector<std::string> permissions;  ///< sorted, unique
};

struct Dataset {
    std::vector<App> apps;
    std::vector<std::string> vocabulary;  ///< sorted union of all permission names
    /// Apps loaded without an average rating; their rating count is forced to 0.
    std::vector<std::string> missing_rating_ids;

    std::size_t size() const { return apps.size(); }

    /// N x D request matrix, rows labelled by app id, columns by permission.
    BinaryMatrix matrix() const;
    BinaryMatrix matrix(std::span<const std::size_t> rows) const;
    std::vector<std::string> categories(std::span<const std::size_t> rows) const;
};

enum class Format { csv, json };

/// "csv" or "json"; throws ConfigError otherwise.
Format parse_format(std::string_view name);

/// Maps schema fields (id, name, category, price, avg_rating, num_ratings,
/// permissions) to source column names, for files that use other headers.
struct ColumnMapping {
    std::map<std::string, std::string> columns;
    std::vector<std::string> ignored;  ///< source columns to skip silently
    char permission_separator = ';';

    /// {"columns": {...}, "ignore": [...], "permission_separator": ";"}
    static ColumnMapping from_json_file(const std::filesystem::path& path);
};

/// Validates apps (unique ids, ratings in range), normalizes permission sets
/// and builds the vocabulary.
Dataset make_dataset(std::vector<App> apps);

Dataset parse_dataset_csv(std::string_view text, const ColumnMapping& mapping = {});
Dataset parse_dataset_json(std::string_view text, const ColumnMapping& mapping = {});
Dataset load_dataset(const std::filesystem::path& path, Format format, const ColumnMapping& mapping = {});

void write_dataset_csv(const Dataset& ds, std::ostream& out);

/// Apps named "app<i>" with permission names taken from `names` (default "p<d>").
Dataset dataset_from_matrix(const BinaryMatrix& x, std::vector<std::string> names = {});

struct ReputationCriteria {
    double min_rating = 4.0;
    std::int64_t min_ratings = 100;
    std::int64_t low_max_ratings = 10;  ///< low reputation: fewer ratings than this
    std::size_t test_size = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Indices into Dataset::apps, each list in ascending order. The three lists are disjoint.
struct ReputationSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test_high;
    std::vector<std::size_t> test_low;
};

/// High reputation: rating >= min_rating and count >= min_ratings. A seeded
/// sample of test_size of those forms test_high and the rest train. Apps with
/// fewer than low_max_ratings ratings form test_low regardless of score.
ReputationSplit filter_reputation(const Dataset& ds, const ReputationCriteria& criteria);

/// Default test-set size: one sixth of the high-reputation population, rounded.
std::size_t auto_test_size(std::size_t high_reputation_count);
std::size_t count_high_reputation(const Dataset& ds, const ReputationCriteria& criteria);

struct PermissionFrequency {
    std::string name;
    std::int64_t count = 0;
    double fraction = 0.0;
};

struct PricePoint {
    double price = 0.0;
    std::int64_t count = 0;
    double cumulative_fraction = 0.0;  ///< fraction of apps priced at or below `price`
};

struct RatingRow {
    std::string id;
    double avg_rating = 0.0;
    std::int64_t num_ratings = 0;
};

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::int64_t count = 0;
};

struct SummaryStats {
    std::size_t apps = 0;
    std::vector<PermissionFrequency> frequencies;  ///< top_n, by count then name
    std::vector<PricePoint> prices;
    std::vector<RatingRow> ratings;  ///< apps with at least one rating
    std::vector<HistogramBin> rating_histogram;  ///< width 0.5 on [1, 5]
    std::vector<HistogramBin> count_histogram;   ///< decades [1,10), [10,100), ...
};

SummaryStats summary_stats(const Dataset& ds, std::size_t top_n);

}  // namespace prpmine

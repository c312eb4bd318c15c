#pragma once

// Delimited result tables with a '#'-prefixed metadata header:
//
//   # key=value            metadata, in insertion order
//   #| text                verbatim echo lines (the run configuration)
//   col_a,col_b,...        column names
//   1.5,nan,...            rows, %.17g
//
// Writing then reading returns an equal table.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wgqed {

struct ResultTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> echo;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Replaces an existing key in place, otherwise appends.
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    std::optional<std::string> get(const std::string& key) const;
    void add_row(std::vector<double> row);
    std::size_t column_index(std::string_view name) const;
    std::vector<double> column(std::string_view name) const;

    bool operator==(const ResultTable& other) const;
};

/// Shortest text that reads back to the same double.
std::string format_number(double v);

std::string to_csv(const ResultTable& table);
ResultTable parse_csv(std::string_view text);

void write_table(const ResultTable& table, const std::filesystem::path& path);
ResultTable read_table(const std::filesystem::path& path);

}  // namespace wgqed

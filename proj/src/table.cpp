#include "wgqed/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wgqed/core.hpp"

namespace wgqed {

void ResultTable::set(const std::string& key, const std::string& value)
{
    if (key.empty() || key.find_first_of("= \t\r\n") != std::string::npos)
        throw DomainError("table: invalid metadata key '" + key + "'");
    if (value.find('\n') != std::string::npos)
        throw DomainError("table: metadata value for '" + key + "' spans lines");
    for (auto& [k, v] : meta)
        if (k == key) {
            v = value;
            return;
        }
    meta.emplace_back(key, value);
}

void ResultTable::set(const std::string& key, double value)
{
    set(key, format_number(value));
}

std::optional<std::string> ResultTable::get(const std::string& key) const
{
    for (const auto& [k, v] : meta)
        if (k == key)
            return v;
    return std::nullopt;
}

void ResultTable::add_row(std::vector<double> row)
{
    if (row.size() != columns.size())
        throw DomainError("table: row has " + std::to_string(row.size()) + " values for " +
                          std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(row));
}

std::size_t ResultTable::column_index(std::string_view name) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name)
            return i;
    throw DomainError("table: no column '" + std::string(name) + "'");
}

std::vector<double> ResultTable::column(std::string_view name) const
{
    const std::size_t k = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back(r[k]);
    return out;
}

bool ResultTable::operator==(const ResultTable& other) const
{
    if (meta != other.meta || echo != other.echo || columns != other.columns ||
        rows.size() != other.rows.size())
        return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != other.rows[i].size())
            return false;
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            const double a = rows[i][j], b = other.rows[i][j];
            if (!(a == b || (std::isnan(a) && std::isnan(b))))
                return false;
        }
    }
    return true;
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_csv(const ResultTable& table)
{
    std::ostringstream os;
    for (const auto& [k, v] : table.meta)
        os << "# " << k << '=' << v << '\n';
    for (const auto& line : table.echo)
        os << "#| " << line << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        os << (i ? "," : "") << table.columns[i];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
    }
    return os.str();
}

namespace {

double parse_value(std::string_view s, std::size_t line)
{
    if (s == "nan")
        return std::nan("");
    if (s == "inf")
        return INFINITY;
    if (s == "-inf")
        return -INFINITY;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DomainError("table line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(s.substr(start, comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

ResultTable parse_csv(std::string_view text)
{
    ResultTable t;
    bool have_columns = false;
    std::size_t lineno = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.starts_with("#| ")) {
            t.echo.emplace_back(line.substr(3));
        } else if (line == "#|") {
            t.echo.emplace_back();
        } else if (line.starts_with("# ")) {
            const auto body = line.substr(2);
            const auto eq = body.find('=');
            if (eq == std::string_view::npos)
                throw DomainError("table line " + std::to_string(lineno) + ": metadata without '='");
            t.meta.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
        } else if (line.empty()) {
            continue;
        } else if (!have_columns) {
            for (auto c : split(line))
                t.columns.emplace_back(c);
            have_columns = true;
        } else {
            std::vector<double> row;
            for (auto c : split(line))
                row.push_back(parse_value(c, lineno));
            if (row.size() != t.columns.size())
                throw DomainError("table line " + std::to_string(lineno) + ": wrong number of fields");
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

void write_table(const ResultTable& table, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << to_csv(table);
    if (!out)
        throw Error("failed writing " + path.string());
}

ResultTable read_table(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

}  // namespace wgqed

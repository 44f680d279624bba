#include "strato/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "strato/errors.hpp"

namespace strato {

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) fail(ErrorCode::IoError, "CSV needs a non-empty header");
}

void CsvWriter::add_row(const std::vector<double>& values) {
    if (values.size() != header_.size())
        fail(ErrorCode::IoError, "CSV row width does not match header");
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) row += ',';
        row += format_double(values[i]);
    }
    rows_.push_back(std::move(row));
}

void CsvWriter::add_mixed_row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size())
        fail(ErrorCode::IoError, "CSV row width does not match header");
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    rows_.push_back(std::move(row));
}

void CsvWriter::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open for writing: " + path);
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out << ',';
        out << header_[i];
    }
    out << '\n';
    for (const auto& row : rows_) out << row << '\n';
    out.flush();
    if (!out) fail(ErrorCode::IoError, "write failed: " + path);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, const std::string& path) {
    const char* first = cell.data();
    const char* last = first + cell.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r'))
        --last;
    double value = 0.0;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        fail(ErrorCode::IoError, "non-numeric CSV cell '" + cell + "' in " + path);
    return value;
}

}  // namespace

CsvTable read_numeric_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open for reading: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line) || line.empty())
        fail(ErrorCode::IoError, "empty CSV: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != table.header.size())
            fail(ErrorCode::IoError, "ragged CSV row in " + path);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) row.push_back(parse_cell(cell, path));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace strato

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace strato {

// Locale-independent decimal formatting, 17 significant digits: enough to
// round-trip any double, and byte-stable across runs.
std::string format_double(double value);

// Minimal RFC-4180-style writer: header row then data rows, '\n' line ends.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(const std::vector<double>& values);
    void add_mixed_row(const std::vector<std::string>& cells);

    // Writes the whole table; throws Error(IoError) on failure.
    void write(const std::string& path) const;

    std::size_t columns() const { return header_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Reads a numeric CSV with a header row; throws Error(IoError) on missing or
// malformed input.
CsvTable read_numeric_csv(const std::string& path);

}  // namespace strato

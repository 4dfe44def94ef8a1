// ============================================================================
// core/csv.hpp - Minimal strict CSV reading/writing used by the file formats
// ============================================================================
#pragma once
#include <string>
#include <vector>

namespace fxc::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows; // numeric payload, one vector per line
};

// Strict reader: every row must have exactly the header's field count and all
// payload fields must parse as doubles. Errors carry 1-based line numbers.
Table read(const std::string& path);

void write(const std::string& path, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows, int precision = 6);

std::vector<std::string> split(const std::string& line, char sep = ',');

// temp-file-then-rename so readers never observe partial output
void atomic_write_text(const std::string& path, const std::string& content);

} // namespace fxc::csv

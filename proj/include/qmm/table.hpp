#pragma once

// Bit-stable CSV output.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace qmm {

enum class ColumnType { real, integer, text, boolean };

struct Column {
    std::string name;
    ColumnType type = ColumnType::real;
};

using Cell = std::variant<double, std::int64_t, std::string, bool>;
using Row = std::vector<Cell>;

/// Scientific notation with nine digits after the point and a bare
/// exponent: 1.0 -> "1.000000000e0", 0.5 -> "5.000000000e-1".
std::string format_real(double value);

/// Header plus one line per row, LF endings. Throws an internal error when a
/// row does not match the schema and a validation error on NaN or infinity.
std::string render_table(const std::vector<Row>& rows, const std::vector<Column>& schema);

/// Renders the whole table first, then writes it in one go.
void write_table(const std::vector<Row>& rows, const std::vector<Column>& schema,
                 const std::filesystem::path& path);

}  // namespace qmm

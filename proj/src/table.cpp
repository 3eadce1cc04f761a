#include "qmm/table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qmm/errors.hpp"

namespace qmm {

std::string format_real(double value) {
    if (!std::isfinite(value)) fail(ErrorKind::validation, "non-finite value in table");
    if (value == 0.0) value = 0.0;  // drop the sign of negative zero
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9e", value);
    std::string s(buf);
    const auto e = s.find('e');
    const int exponent = std::atoi(s.c_str() + e + 1);
    return s.substr(0, e) + "e" + std::to_string(exponent);
}

namespace {

const char* type_name(ColumnType t) {
    switch (t) {
        case ColumnType::real: return "real";
        case ColumnType::integer: return "integer";
        case ColumnType::text: return "text";
        case ColumnType::boolean: return "boolean";
    }
    return "?";
}

bool matches(const Cell& c, ColumnType t) {
    switch (t) {
        case ColumnType::real: return std::holds_alternative<double>(c);
        case ColumnType::integer: return std::holds_alternative<std::int64_t>(c);
        case ColumnType::text: return std::holds_alternative<std::string>(c);
        case ColumnType::boolean: return std::holds_alternative<bool>(c);
    }
    return false;
}

std::string render_cell(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) return format_real(*d);
    if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const bool* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    return quoted + "\"";
}

}  // namespace

std::string render_table(const std::vector<Row>& rows, const std::vector<Column>& schema) {
    if (schema.empty()) fail(ErrorKind::internal, "table schema has no columns");
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != schema.size()) {
            std::ostringstream os;
            os << "row " << r << " has " << rows[r].size() << " cells, schema has "
               << schema.size();
            fail(ErrorKind::internal, os.str());
        }
        for (std::size_t c = 0; c < schema.size(); ++c) {
            if (!matches(rows[r][c], schema[c].type)) {
                std::ostringstream os;
                os << "row " << r << " column '" << schema[c].name << "' is not "
                   << type_name(schema[c].type);
                fail(ErrorKind::internal, os.str());
            }
            if (const double* d = std::get_if<double>(&rows[r][c]); d && !std::isfinite(*d)) {
                std::ostringstream os;
                os << "row " << r << " column '" << schema[c].name << "' is not finite";
                fail(ErrorKind::validation, os.str());
            }
        }
    }

    std::string out;
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (c) out += ',';
        out += schema[c].name;
    }
    out += '\n';
    for (const Row& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += render_cell(row[c]);
        }
        out += '\n';
    }
    return out;
}

void write_table(const std::vector<Row>& rows, const std::vector<Column>& schema,
                 const std::filesystem::path& path) {
    const std::string text = render_table(rows, schema);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) fail(ErrorKind::io, "write to " + path.string() + " failed");
}

}  // namespace qmm

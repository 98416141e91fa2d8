#include "erslp/data/fredmd.hpp"

#include "erslp/util/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace erslp {
namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

bool blank(const std::vector<std::string>& cells) {
    for (const auto& c : cells) {
        if (!c.empty()) return false;
    }
    return true;
}

std::string where(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

}  // namespace

RawPanel read_fredmd_csv(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    auto next_line = [&](std::vector<std::string>& cells) {
        while (std::getline(in, line)) {
            ++row;
            cells = split_csv(line);
            if (!blank(cells)) return true;
        }
        return false;
    };

    std::vector<std::string> header;
    if (!next_line(header) || header.size() < 2) throw DataError("fredmd: missing or malformed header row");
    for (std::size_t j = 1; j < header.size(); ++j) {
        if (header[j].empty()) throw DataError("fredmd: empty variable name at " + where(row, j + 1));
    }
    const std::size_t n = header.size() - 1;

    std::vector<std::string> code_row;
    if (!next_line(code_row)) throw DataError("fredmd: missing transform-code row");
    const std::size_t code_line = row;
    if (code_row.front().rfind("Transform", 0) != 0) {
        throw DataError("fredmd: row " + std::to_string(code_line) + " must start with 'Transform:'");
    }
    if (code_row.size() != header.size()) {
        throw DataError("fredmd: transform row has " + std::to_string(code_row.size()) + " cells, header has " +
                        std::to_string(header.size()));
    }
    RawPanel raw;
    for (std::size_t j = 1; j < code_row.size(); ++j) {
        double parsed = 0.0;
        const auto& cell = code_row[j];
        const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), parsed);
        const int code = static_cast<int>(parsed);
        if (cell.empty() || r.ec != std::errc{} || r.ptr != cell.data() + cell.size() ||
            parsed != static_cast<double>(code) || !TransformCode::valid(code)) {
            throw DataError("fredmd: invalid transform code '" + cell + "' for column '" + header[j] + "' at " +
                            where(code_line, j + 1));
        }
        raw.codes.push_back(TransformCode{code});
    }

    std::vector<std::vector<double>> rows;
    std::vector<std::string> cells;
    while (next_line(cells)) {
        if (cells.size() != header.size()) {
            throw DataError("fredmd: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(header.size()));
        }
        const auto period = parse_period(cells[0]);
        if (!period) throw DataError("fredmd: unparseable date '" + cells[0] + "' at " + where(row, 1));
        std::vector<double> values(n, kMissing);
        for (std::size_t j = 1; j < cells.size(); ++j) {
            const auto& cell = cells[j];
            if (cell.empty() || cell == "NA" || cell == "NaN") continue;
            double v = 0.0;
            const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (r.ec != std::errc{} || r.ptr != cell.data() + cell.size()) {
                throw DataError("fredmd: non-numeric value '" + cell + "' at " + where(row, j + 1));
            }
            values[j - 1] = v;
        }
        raw.panel.dates.push_back(cells[0]);
        raw.panel.periods.push_back(*period);
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw DataError("fredmd: no observation rows");

    raw.panel.names.assign(header.begin() + 1, header.end());
    raw.panel.values = Matrix(rows.size(), n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) raw.panel.values(i, j) = rows[i][j];
    }
    raw.panel.validate_structure();
    return raw;
}

RawPanel load_fredmd_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("fredmd: cannot open '" + path.string() + "'");
    return read_fredmd_csv(in);
}

void write_fredmd_csv(std::ostream& out, const TimeSeriesPanel& panel, const std::vector<TransformCode>& codes) {
    if (codes.size() != panel.num_variables()) throw InputError("write_fredmd_csv: code count mismatch");
    out << "sasdate";
    for (const auto& n : panel.names) out << ',' << n;
    out << "\nTransform:";
    for (const auto& c : codes) out << ',' << c.code;
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < panel.num_periods(); ++i) {
        out << panel.dates[i];
        for (std::size_t j = 0; j < panel.num_variables(); ++j) {
            out << ',';
            const double v = panel.values(i, j);
            if (is_missing(v)) continue;
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace erslp

#include "qarlab/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qarlab {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_number(const std::string& cell, int line_no, int col_no) {
    if (cell.empty())
        throw ParseError("line " + std::to_string(line_no) + ", column " +
                         std::to_string(col_no) + ": missing value");
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != cell.size())
        throw ParseError("line " + std::to_string(line_no) + ", column " +
                         std::to_string(col_no) + ": not a number: '" + cell +
                         "'");
    return v;
}

} // namespace

const std::vector<double>& WideTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return columns[i];
    throw IoError("no column named '" + name + "'");
}

WideTable read_wide_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");

    WideTable t;
    t.names = split_line(line);
    if (t.names.empty()) throw ParseError(path + ": empty header row");
    t.columns.resize(t.names.size());

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != t.names.size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(t.names.size()) + " cells, got " +
                             std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c)
            t.columns[c].push_back(
                parse_number(cells[c], line_no, static_cast<int>(c) + 1));
    }
    if (t.rows() == 0) throw ParseError(path + ": no data rows");
    return t;
}

void write_wide_csv(const std::string& path,
                    const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& columns) {
    if (names.size() != columns.size())
        throw IoError("column name/data mismatch");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (std::size_t i = 0; i < names.size(); ++i)
        out << (i ? "," : "") << names[i];
    out << "\n";
    const std::size_t rows = columns.empty() ? 0 : columns[0].size();
    for (const auto& col : columns)
        if (col.size() != rows) throw IoError("ragged columns");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << fmt17(columns[c][r]);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

StationSet read_stations_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    const auto header = split_line(line);
    if (header.size() < 3 || header[0] != "id")
        throw ParseError(path + ": station header must be id,x,y[,elev]");
    const bool has_elev = header.size() >= 4;

    std::vector<std::string> ids;
    std::vector<Coord> coords;
    std::vector<double> elev;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw ParseError("line " + std::to_string(line_no) +
                             ": wrong cell count");
        if (cells[0].empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty id");
        ids.push_back(cells[0]);
        coords.push_back({parse_number(cells[1], line_no, 2),
                          parse_number(cells[2], line_no, 3)});
        if (has_elev) elev.push_back(parse_number(cells[3], line_no, 4));
    }
    return StationSet::create(std::move(ids), std::move(coords), std::move(elev));
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace qarlab

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gdp/errors.hpp"
#include "gdp/model.hpp"

namespace gdp {

// 17 significant digits: doubles round-trip exactly through text.
inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw DataError("CSV: non-numeric cell '" + cell + "' at data row " +
                        std::to_string(row) + ", column '" + column + "'");
    return v;
}

// First row is a header; the named response column becomes y, every other
// column a predictor.
inline Dataset load_csv(const std::string& path, const std::string& response) {
    std::ifstream in(path);
    if (!in) throw DataError("CSV: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("CSV: empty file '" + path + "'");
    auto header = split_csv_line(line);
    int resp = -1;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == response) resp = static_cast<int>(j);
    if (resp < 0) throw DataError("CSV: response column '" + response + "' not found in header");
    if (header.size() < 2) throw DataError("CSV: need at least one predictor besides the response");

    std::vector<std::vector<double>> rows;
    std::size_t rowno = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++rowno;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError("CSV: data row " + std::to_string(rowno) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()));
        std::vector<double> vals(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j)
            vals[j] = parse_cell(cells[j], rowno, header[j]);
        rows.push_back(std::move(vals));
    }
    if (rows.size() < 2) throw DataError("CSV: need at least 2 data rows");

    Dataset d;
    int p = static_cast<int>(header.size()) - 1;
    d.y.resize(rows.size());
    d.X.resize(rows.size(), p);
    for (std::size_t j = 0, k = 0; j < header.size(); ++j)
        if (static_cast<int>(j) != resp) d.names.push_back(header[j]), ++k;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        d.y[static_cast<int>(i)] = rows[i][resp];
        for (std::size_t j = 0, k = 0; j < header.size(); ++j)
            if (static_cast<int>(j) != resp) d.X(static_cast<int>(i), static_cast<int>(k++)) = rows[i][j];
    }
    d.validate();
    return d;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("CSV: cannot write '" + path + "'");
    for (std::size_t j = 0; j < header.size(); ++j)
        out << header[j] << (j + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j)
            out << format_g17(row[j]) << (j + 1 < row.size() ? "," : "\n");
    }
}

}  // namespace gdp

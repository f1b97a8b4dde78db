#include "csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace lrmsim {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::string header_json, std::vector<std::string> columns) : width_(columns.size()) {
    require(header_json.find('\n') == std::string::npos, "csv: header JSON must be a single line");
    text_ = "# " + header_json + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) text_ += ',';
        text_ += columns[i];
    }
    text_ += '\n';
}

void CsvTable::row(std::initializer_list<Cell> cells) {
    require(cells.size() == width_, "csv: row width does not match the columns");
    bool first = true;
    for (const Cell& c : cells) {
        if (!first) text_ += ',';
        first = false;
        if (const auto* i = std::get_if<long long>(&c)) text_ += std::to_string(*i);
        else if (const auto* d = std::get_if<double>(&c)) text_ += format_double(*d);
        else text_ += std::get<std::string>(c);
    }
    text_ += '\n';
    ++rows_;
}

std::size_t CsvData::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    fail_invalid("csv: missing column '" + name + "'");
}

double CsvData::number(std::size_t row, std::size_t col) const {
    const std::string& s = rows.at(row).at(col);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    require(used == s.size() && !s.empty(), "csv: not a number: '" + s + "'");
    return v;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out(1);
    for (char ch : line) {
        if (ch == ',') out.emplace_back();
        else out.back() += ch;
    }
    return out;
}

}  // namespace

CsvData parse_csv(const std::string& text) {
    CsvData d;
    std::istringstream in(text);
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (!have_columns && d.header_json.empty()) d.header_json = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
            continue;
        }
        if (!have_columns) {
            d.columns = split(line);
            have_columns = true;
            continue;
        }
        auto cells = split(line);
        require(cells.size() == d.columns.size(), "csv: row width does not match the columns");
        d.rows.push_back(std::move(cells));
    }
    require(have_columns, "csv: no column row");
    return d;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace lrmsim

#pragma once

#include <string>
#include <variant>
#include <vector>

namespace lrmsim {

// Text CSV with a single "# {json}" header line, then the column row.
class CsvTable {
public:
    using Cell = std::variant<long long, double, std::string>;

    CsvTable(std::string header_json, std::vector<std::string> columns);

    void row(std::initializer_list<Cell> cells);
    const std::string& str() const { return text_; }
    std::size_t rows() const { return rows_; }

private:
    std::size_t width_;
    std::size_t rows_ = 0;
    std::string text_;
};

// 17 significant digits, round-trips every finite double.
std::string format_double(double v);

struct CsvData {
    std::string header_json;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
    double number(std::size_t row, std::size_t col) const;
};

CsvData parse_csv(const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace lrmsim

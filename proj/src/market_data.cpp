#include "esqubo/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <utility>

namespace esqubo::market_data {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, const std::string& date, const std::string& asset) {
    if (cell.empty())
        throw MissingCellError("missing cell at date " + date + ", column " + asset);
    const char* begin = cell.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end != begin + cell.size())
        throw MalformedCsvError("unparsable number '" + cell + "' at date " + date + ", column " +
                                asset);
    if (!std::isfinite(value))
        throw NonFiniteCellError("non-finite value at date " + date + ", column " + asset);
    return value;
}

}  // namespace

ReturnsPanel::ReturnsPanel(std::vector<std::string> dates_in,
                           std::vector<std::string> asset_ids_in,
                           Eigen::MatrixXd values_in,
                           std::size_t benchmark_index_in)
    : dates(std::move(dates_in)),
      asset_ids(std::move(asset_ids_in)),
      values(std::move(values_in)),
      benchmark_index(benchmark_index_in) {
    if (asset_ids.size() < 2) throw MalformedCsvError("panel needs at least two assets");
    if (dates.size() < 2) throw MalformedCsvError("panel needs at least two periods");
    if (values.rows() != static_cast<Eigen::Index>(asset_ids.size()) ||
        values.cols() != static_cast<Eigen::Index>(dates.size()))
        throw MalformedCsvError("values matrix shape does not match dates/assets");
    if (benchmark_index >= asset_ids.size())
        throw std::out_of_range("benchmark index outside the asset list");

    std::set<std::string> seen_assets;
    for (const auto& id : asset_ids)
        if (!seen_assets.insert(id).second)
            throw DuplicateAssetError("duplicate asset id '" + id + "'");
    for (std::size_t k = 1; k < dates.size(); ++k) {
        if (dates[k] == dates[k - 1])
            throw DuplicateDateError("duplicate date '" + dates[k] + "'");
        if (dates[k] < dates[k - 1])
            throw DateOrderError("dates out of order at '" + dates[k] + "'");
    }
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index k = 0; k < values.cols(); ++k)
            if (!std::isfinite(values(i, k)))
                throw NonFiniteCellError("non-finite value at date " +
                                         dates[static_cast<std::size_t>(k)] + ", column " +
                                         asset_ids[static_cast<std::size_t>(i)]);
}

ReturnsPanel load_returns(std::istream& source, const std::string& benchmark_id) {
    std::string line;
    if (!std::getline(source, line)) throw MalformedCsvError("empty input");
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "date")
        throw MalformedCsvError("header must start with 'date' followed by asset columns");
    std::vector<std::string> asset_ids(header.begin() + 1, header.end());
    if (asset_ids.size() < 2) throw MalformedCsvError("need at least two asset columns");

    auto bench = std::find(asset_ids.begin(), asset_ids.end(), benchmark_id);
    if (bench == asset_ids.end())
        throw MissingBenchmarkError("benchmark column '" + benchmark_id + "' not found");
    auto benchmark_index = static_cast<std::size_t>(bench - asset_ids.begin());

    std::vector<std::string> dates;
    std::vector<std::vector<double>> rows;  // one per period
    while (std::getline(source, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw MalformedCsvError("row at '" + (cells.empty() ? line : cells[0]) + "' has " +
                                    std::to_string(cells.size()) + " cells, expected " +
                                    std::to_string(header.size()));
        if (cells[0].empty()) throw MissingCellError("missing date in row " + std::to_string(rows.size() + 2));
        dates.push_back(cells[0]);
        std::vector<double> row(asset_ids.size());
        for (std::size_t j = 0; j < asset_ids.size(); ++j)
            row[j] = parse_cell(cells[j + 1], cells[0], asset_ids[j]);
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw MalformedCsvError("need at least two data rows");

    Eigen::MatrixXd values(static_cast<Eigen::Index>(asset_ids.size()),
                           static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t i = 0; i < asset_ids.size(); ++i)
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[k][i];

    return ReturnsPanel(std::move(dates), std::move(asset_ids), std::move(values), benchmark_index);
}

WindowSpec::WindowSpec(std::size_t length, std::size_t stride) : length(length), stride(stride) {
    if (length < 2) throw std::invalid_argument("window length must be at least 2");
    if (stride < 1) throw std::invalid_argument("window stride must be at least 1");
}

std::vector<WindowRange> windows(const ReturnsPanel& panel, const WindowSpec& spec) {
    const std::size_t t = panel.n_periods();
    if (spec.length > t)
        throw std::invalid_argument("window length " + std::to_string(spec.length) +
                                    " exceeds the series length " + std::to_string(t));
    std::vector<WindowRange> out;
    for (std::size_t begin = 0; begin + spec.length <= t; begin += spec.stride)
        out.push_back(WindowRange{static_cast<int>(out.size()), begin, begin + spec.length});
    return out;
}

WindowStats window_stats(const ReturnsPanel& panel, const WindowRange& range) {
    if (range.end <= range.begin || range.end - range.begin < 2)
        throw std::invalid_argument("window must span at least 2 periods");
    if (range.end > panel.n_periods()) throw std::out_of_range("window range outside the series");

    const auto w = static_cast<Eigen::Index>(range.end - range.begin);
    Eigen::MatrixXd slice = panel.values.middleCols(static_cast<Eigen::Index>(range.begin), w);

    Eigen::VectorXd mu = slice.rowwise().mean();
    Eigen::MatrixXd centered = slice.colwise() - mu;
    Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(w - 1);
    // commutative additions make the average exactly symmetric as stored
    cov = (0.5 * (cov + cov.transpose())).eval();

    double var_b = cov(static_cast<Eigen::Index>(panel.benchmark_index),
                       static_cast<Eigen::Index>(panel.benchmark_index));
    WindowStats stats;
    stats.mu = std::move(mu);
    stats.cov = std::move(cov);
    stats.benchmark_sigma = std::sqrt(std::max(0.0, var_b));
    stats.window_index = range.index;
    return stats;
}

}  // namespace esqubo::market_data

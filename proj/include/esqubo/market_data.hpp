#pragma once

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace esqubo::market_data {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MalformedCsvError : CsvError {
    using CsvError::CsvError;
};
struct MissingBenchmarkError : CsvError {
    using CsvError::CsvError;
};
struct MissingCellError : CsvError {
    using CsvError::CsvError;
};
struct NonFiniteCellError : CsvError {
    using CsvError::CsvError;
};
struct DuplicateDateError : CsvError {
    using CsvError::CsvError;
};
struct DuplicateAssetError : CsvError {
    using CsvError::CsvError;
};
struct DateOrderError : CsvError {
    using CsvError::CsvError;
};

/// Dated asset-returns matrix, N assets by T periods, with one designated
/// benchmark series used as the market-volatility reference.
///
/// Immutable after construction; safe to share across threads.
struct ReturnsPanel {
    std::vector<std::string> dates;      // strictly increasing, length T
    std::vector<std::string> asset_ids;  // unique, length N
    Eigen::MatrixXd values;              // N x T period returns (0.01 = +1%)
    std::size_t benchmark_index;

    ReturnsPanel(std::vector<std::string> dates,
                 std::vector<std::string> asset_ids,
                 Eigen::MatrixXd values,
                 std::size_t benchmark_index);

    std::size_t n_assets() const { return asset_ids.size(); }
    std::size_t n_periods() const { return dates.size(); }
};

/// Rolling-window geometry: window length and step between window starts,
/// both in periods.
struct WindowSpec {
    std::size_t length;  // >= 2
    std::size_t stride;  // >= 1

    WindowSpec(std::size_t length, std::size_t stride);
};

/// Half-open column range [begin, end) of one rolling window.
struct WindowRange {
    int index;
    std::size_t begin;
    std::size_t end;
};

/// Per-window statistics consumed by the optimizer.
struct WindowStats {
    Eigen::VectorXd mu;       // mean period return per asset, length N
    Eigen::MatrixXd cov;      // N x N, symmetric as stored
    double benchmark_sigma;   // stddev of benchmark returns in the window
    int window_index;
};

/// Parse the returns CSV (header "date,<asset>,..."; one row per period,
/// ascending dates) and validate it into an N x T panel.
ReturnsPanel load_returns(std::istream& source, const std::string& benchmark_id);

/// Window ranges [k*stride, k*stride + length) for k = 0,1,... while the
/// end stays within the series. Always yields at least one window.
std::vector<WindowRange> windows(const ReturnsPanel& panel, const WindowSpec& spec);

/// Mean vector, W-1 denominator covariance (exactly symmetric as stored)
/// and benchmark volatility over one column range.
WindowStats window_stats(const ReturnsPanel& panel, const WindowRange& range);

}  // namespace esqubo::market_data

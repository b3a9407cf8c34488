#include "emi/stats/table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "emi/csv.hpp"
#include "emi/errors.hpp"

namespace emi::stats {

namespace {
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
}

TimeSeriesTable::TimeSeriesTable(std::vector<int> index) : index_(std::move(index)) {
    if (!std::is_sorted(index_.begin(), index_.end()) ||
        std::adjacent_find(index_.begin(), index_.end()) != index_.end())
        throw DataError("time-series index must be strictly increasing");
}

void TimeSeriesTable::set_column(const std::string& name, Eigen::VectorXd values) {
    if (values.size() != rows())
        throw DataError(fmt::format("column '{}' has {} values, index has {}", name, values.size(), rows()));
    if (!columns_.contains(name)) order_.push_back(name);
    columns_[name] = std::move(values);
}

bool TimeSeriesTable::has_column(std::string_view name) const { return columns_.find(name) != columns_.end(); }

const Eigen::VectorXd& TimeSeriesTable::column(std::string_view name) const {
    auto it = columns_.find(name);
    if (it == columns_.end()) throw MissingColumnError(std::string(name));
    return it->second;
}

std::vector<std::string> TimeSeriesTable::column_names() const { return order_; }

Eigen::VectorXd TimeSeriesTable::lagged(std::string_view name, int lag) const {
    if (lag < 0) throw std::invalid_argument("lag must be non-negative");
    const auto& col = column(name);
    Eigen::VectorXd out = Eigen::VectorXd::Constant(rows(), kMissing);
    for (Eigen::Index i = lag; i < rows(); ++i) out(i) = col(i - lag);
    return out;
}

void TimeSeriesTable::log_transform(const std::string& name) {
    auto it = columns_.find(name);
    if (it == columns_.end()) throw MissingColumnError(name);
    for (double& v : it->second) v = v > 0.0 ? std::log(v) : kMissing;
    transforms_.push_back("log(" + name + ")");
}

void TimeSeriesTable::standardize(const std::string& name) {
    auto it = columns_.find(name);
    if (it == columns_.end()) throw MissingColumnError(name);
    auto& col = it->second;
    double sum = 0.0;
    int n = 0;
    for (double v : col)
        if (!std::isnan(v)) sum += v, ++n;
    if (n < 2) throw DataError(fmt::format("cannot standardize '{}' with fewer than 2 values", name));
    const double m = sum / n;
    double ss = 0.0;
    for (double v : col)
        if (!std::isnan(v)) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / (n - 1));
    if (sd == 0.0) throw ZeroVarianceError(fmt::format("cannot standardize constant column '{}'", name));
    for (double& v : col)
        if (!std::isnan(v)) v = (v - m) / sd;
    transforms_.push_back("z(" + name + ")");
}

TimeSeriesTable TimeSeriesTable::slice(int first, int last) const {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < rows(); ++i)
        if (index_[static_cast<std::size_t>(i)] >= first && index_[static_cast<std::size_t>(i)] <= last)
            keep.push_back(i);
    std::vector<int> idx;
    for (auto i : keep) idx.push_back(index_[static_cast<std::size_t>(i)]);
    TimeSeriesTable out(std::move(idx));
    for (const auto& name : order_) {
        const auto& col = columns_.at(name);
        Eigen::VectorXd values(static_cast<Eigen::Index>(keep.size()));
        for (std::size_t k = 0; k < keep.size(); ++k) values(static_cast<Eigen::Index>(k)) = col(keep[k]);
        out.set_column(name, std::move(values));
    }
    out.transforms_ = transforms_;
    return out;
}

TimeSeriesTable TimeSeriesTable::read_csv(std::istream& in, std::string_view index_column) {
    const auto raw = csv::read(in);
    const std::size_t idx_col = raw.column(index_column);
    std::vector<std::pair<int, std::size_t>> order;
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        const double v = csv::parse_real(raw.rows[r][idx_col]);
        if (std::isnan(v) || v != std::floor(v))
            throw DataError(fmt::format("invalid session value '{}'", raw.rows[r][idx_col]));
        order.emplace_back(static_cast<int>(v), r);
    }
    std::sort(order.begin(), order.end());
    std::vector<int> index;
    for (auto& [s, r] : order) index.push_back(s);
    TimeSeriesTable table(std::move(index));
    for (std::size_t c = 0; c < raw.header.size(); ++c) {
        if (c == idx_col) continue;
        Eigen::VectorXd values(static_cast<Eigen::Index>(order.size()));
        for (std::size_t k = 0; k < order.size(); ++k)
            values(static_cast<Eigen::Index>(k)) = csv::parse_real(raw.rows[order[k].second][c]);
        table.set_column(raw.header[c], std::move(values));
    }
    return table;
}

TimeSeriesTable TimeSeriesTable::read_csv(const std::filesystem::path& path, std::string_view index_column) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open time-series table '{}'", path.string()));
    return read_csv(in, index_column);
}

void TimeSeriesTable::write_csv(std::ostream& out, std::string_view index_column) const {
    fmt::print(out, "{}", index_column);
    for (const auto& name : order_) fmt::print(out, ",{}", csv::escape(name));
    fmt::print(out, "\n");
    for (Eigen::Index i = 0; i < rows(); ++i) {
        fmt::print(out, "{}", index_[static_cast<std::size_t>(i)]);
        for (const auto& name : order_) {
            const double v = columns_.at(name)(i);
            if (std::isnan(v))
                fmt::print(out, ",");
            else
                fmt::print(out, ",{}", v);
        }
        fmt::print(out, "\n");
    }
}

}  // namespace emi::stats

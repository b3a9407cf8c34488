#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace emi::stats {

// Session-indexed real columns; NaN marks a missing value. Lags shift by
// position within the index, so rows must be in session order.
class TimeSeriesTable {
public:
    TimeSeriesTable() = default;
    explicit TimeSeriesTable(std::vector<int> index);

    const std::vector<int>& index() const { return index_; }
    Eigen::Index rows() const { return static_cast<Eigen::Index>(index_.size()); }

    void set_column(const std::string& name, Eigen::VectorXd values);
    bool has_column(std::string_view name) const;
    // Throws MissingColumnError.
    const Eigen::VectorXd& column(std::string_view name) const;
    std::vector<std::string> column_names() const;

    // value(t - lag); the first `lag` rows are missing.
    Eigen::VectorXd lagged(std::string_view name, int lag) const;

    // Natural log in place; non-positive values become missing.
    void log_transform(const std::string& name);
    // (x - mean) / sd over the non-missing values, sample sd.
    void standardize(const std::string& name);
    // Transformations applied so far, e.g. "log(nlaw)", "z(EMI)".
    const std::vector<std::string>& transforms() const { return transforms_; }

    // Rows whose index lies in [first, last].
    TimeSeriesTable slice(int first, int last) const;

    static TimeSeriesTable read_csv(const std::filesystem::path& path, std::string_view index_column = "session");
    static TimeSeriesTable read_csv(std::istream& in, std::string_view index_column = "session");
    void write_csv(std::ostream& out, std::string_view index_column = "session") const;

private:
    std::vector<int> index_;
    std::map<std::string, Eigen::VectorXd, std::less<>> columns_;
    std::vector<std::string> order_;
    std::vector<std::string> transforms_;
};

}  // namespace emi::stats

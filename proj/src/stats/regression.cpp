#include "emi/stats/regression.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

#include "emi/stats/distributions.hpp"

namespace emi::stats {

int default_bandwidth(Eigen::Index n_obs) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n_obs) / 100.0, 2.0 / 9.0)));
}

std::string Term::label() const {
    return lag == 0 ? fmt::format("{}(t)", column) : fmt::format("{}(t-{})", column, lag);
}

std::string Interaction::label() const { return first.label() + "*" + second.label(); }

std::vector<std::string> RegressionSpec::labels() const {
    std::vector<std::string> out;
    if (include_intercept) out.emplace_back("Intercept");
    for (const auto& t : terms) out.push_back(t.label());
    for (const auto& i : interactions) out.push_back(i.label());
    return out;
}

void RegressionSpec::validate() const {
    auto check_lag = [](const Term& t) {
        if (t.lag < 0) throw std::invalid_argument(fmt::format("negative lag in term '{}'", t.column));
    };
    check_lag(dependent);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        check_lag(terms[i]);
        for (std::size_t j = i + 1; j < terms.size(); ++j)
            if (terms[i] == terms[j])
                throw std::invalid_argument(fmt::format("duplicate term '{}'", terms[i].label()));
    }
    for (std::size_t i = 0; i < interactions.size(); ++i) {
        check_lag(interactions[i].first);
        check_lag(interactions[i].second);
        for (std::size_t j = i + 1; j < interactions.size(); ++j)
            if (interactions[i] == interactions[j])
                throw std::invalid_argument(fmt::format("duplicate interaction '{}'", interactions[i].label()));
    }
    if (terms.empty() && interactions.empty() && !include_intercept)
        throw std::invalid_argument("regression has no regressors");
}

Eigen::Index RegressionFit::position(std::string_view label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw std::out_of_range(fmt::format("no coefficient '{}'", label));
    return static_cast<Eigen::Index>(it - labels.begin());
}

RegressionFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::string> labels,
                      bool has_intercept) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (static_cast<Eigen::Index>(labels.size()) != p) throw std::invalid_argument("label count differs from design");
    if (y.size() != n) throw std::invalid_argument("response length differs from design");
    if (n <= p)
        throw DataError(fmt::format("regression needs more observations than parameters ({} <= {})", n, p));

    auto ls = least_squares(X, y);
    if (!ls.dependent_columns.empty()) {
        std::vector<std::string> names;
        for (auto c : ls.dependent_columns) names.push_back(labels[static_cast<std::size_t>(c)]);
        std::string joined;
        for (const auto& nm : names) joined += (joined.empty() ? "" : ", ") + nm;
        throw SingularDesignError(fmt::format("singular design: collinear column(s) {}", joined), std::move(names));
    }

    RegressionFit fit;
    fit.labels = std::move(labels);
    fit.has_intercept = has_intercept;
    fit.design = X;
    fit.response = y;
    fit.coefficients = std::move(ls.coefficients);
    fit.residuals = std::move(ls.residuals);
    fit.xtx_inverse = std::move(ls.xtx_inverse);

    const double dof = static_cast<double>(n - p);
    const double ssr = fit.residuals.squaredNorm();
    const double sst = has_intercept ? (y.array() - y.mean()).matrix().squaredNorm() : y.squaredNorm();
    const double s2 = ssr / dof;
    fit.sigma = std::sqrt(s2);
    fit.se = (fit.xtx_inverse.diagonal() * s2).cwiseSqrt();
    fit.t = fit.coefficients.cwiseQuotient(fit.se);
    fit.p.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) fit.p(j) = t_two_sided_p(fit.t(j), dof);

    fit.r_squared = sst > 0 ? 1.0 - ssr / sst : std::numeric_limits<double>::quiet_NaN();
    const double base = has_intercept ? static_cast<double>(n - 1) : static_cast<double>(n);
    fit.adj_r_squared = 1.0 - (1.0 - fit.r_squared) * base / dof;
    const double df_model = has_intercept ? static_cast<double>(p - 1) : static_cast<double>(p);
    if (df_model > 0) {
        fit.f_statistic = (fit.r_squared / df_model) / ((1.0 - fit.r_squared) / dof);
        fit.f_p = f_sf(fit.f_statistic, df_model, dof);
    } else {
        fit.f_statistic = std::numeric_limits<double>::quiet_NaN();
        fit.f_p = std::numeric_limits<double>::quiet_NaN();
    }

    auto hac = hac_se(fit, std::min<int>(default_bandwidth(n), static_cast<int>(n - 1)));
    fit.hac_se = std::move(hac.se);
    fit.hac_p = std::move(hac.p);
    fit.hac_bandwidth = hac.bandwidth;
    return fit;
}

Design build_design(const RegressionSpec& spec, const TimeSeriesTable& table) {
    spec.validate();
    const Eigen::Index rows = table.rows();
    std::vector<Eigen::VectorXd> cols;
    if (spec.include_intercept) cols.push_back(Eigen::VectorXd::Ones(rows));
    for (const auto& t : spec.terms) cols.push_back(table.lagged(t.column, t.lag));
    for (const auto& i : spec.interactions)
        cols.push_back(table.lagged(i.first.column, i.first.lag).cwiseProduct(table.lagged(i.second.column, i.second.lag)));
    const Eigen::VectorXd y = table.lagged(spec.dependent.column, spec.dependent.lag);

    std::vector<Eigen::Index> keep;
    for (Eigen::Index r = 0; r < rows; ++r) {
        bool ok = !std::isnan(y(r));
        for (const auto& c : cols) ok = ok && !std::isnan(c(r));
        if (ok) keep.push_back(r);
    }

    Design d;
    d.labels = spec.labels();
    const auto n = static_cast<Eigen::Index>(keep.size());
    d.X.resize(n, static_cast<Eigen::Index>(cols.size()));
    d.y.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index r = keep[static_cast<std::size_t>(k)];
        for (std::size_t c = 0; c < cols.size(); ++c) d.X(k, static_cast<Eigen::Index>(c)) = cols[c](r);
        d.y(k) = y(r);
        d.sessions.push_back(table.index()[static_cast<std::size_t>(r)]);
    }
    return d;
}

RegressionFit ols_fit(const RegressionSpec& spec, const TimeSeriesTable& table) {
    auto d = build_design(spec, table);
    auto fit = ols_fit(d.X, d.y, std::move(d.labels), spec.include_intercept);
    fit.name = spec.name;
    fit.sessions = std::move(d.sessions);
    return fit;
}

HacResult hac_se(const RegressionFit& fit, std::optional<int> bandwidth) {
    const Eigen::Index n = fit.n_obs();
    const int L = bandwidth.value_or(default_bandwidth(n));
    if (L < 0) throw std::invalid_argument("HAC bandwidth must be non-negative");
    if (L >= n)
        throw std::invalid_argument(fmt::format("HAC bandwidth {} must be below the sample size {}", L, n));
    const Eigen::MatrixXd cov = newey_west_covariance(fit.design, fit.residuals, fit.xtx_inverse, L);
    HacResult out;
    out.bandwidth = L;
    out.se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    out.p.resize(out.se.size());
    const double dof = static_cast<double>(n - fit.n_params());
    for (Eigen::Index j = 0; j < out.se.size(); ++j)
        out.p(j) = t_two_sided_p(fit.coefficients(j) / out.se(j), dof);
    return out;
}

}  // namespace emi::stats

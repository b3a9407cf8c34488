#include "emi/stats/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "emi/stats/critical_values.hpp"
#include "emi/stats/distributions.hpp"

namespace emi::stats {

namespace {

Eigen::Index column_rank(const Eigen::MatrixXd& m) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    qr.setThreshold(1e-10);
    return qr.rank();
}

Eigen::MatrixXd drop_column(const Eigen::MatrixXd& m, Eigen::Index j) {
    Eigen::MatrixXd out(m.rows(), m.cols() - 1);
    out << m.leftCols(j), m.rightCols(m.cols() - j - 1);
    return out;
}

}  // namespace

std::vector<VifEntry> vif(const Eigen::MatrixXd& columns, std::span<const std::string> names) {
    const Eigen::Index k = columns.cols();
    if (k < 2) throw std::invalid_argument("VIF needs at least two columns");
    if (static_cast<Eigen::Index>(names.size()) != k) throw std::invalid_argument("VIF name count differs from columns");
    if (columns.rows() <= k) throw DataError("VIF needs more rows than columns");

    const Eigen::MatrixXd centered = columns.rowwise() - columns.colwise().mean();
    const Eigen::Index full_rank = column_rank(centered);

    std::vector<VifEntry> out;
    for (Eigen::Index j = 0; j < k; ++j) {
        VifEntry e;
        e.name = names[static_cast<std::size_t>(j)];
        const Eigen::VectorXd target = centered.col(j);
        const Eigen::MatrixXd others = drop_column(centered, j);
        // Column j takes part in an exact dependence iff dropping it keeps the rank.
        if (target.squaredNorm() == 0.0 || (full_rank < k && column_rank(others) == full_rank)) {
            e.collinear = true;
            e.value = std::numeric_limits<double>::infinity();
            out.push_back(std::move(e));
            continue;
        }
        // Exactly orthogonal to the rest: nothing to explain, VIF is 1 without rounding noise.
        if ((others.transpose() * target).isZero(0.0)) {
            out.push_back(std::move(e));
            continue;
        }
        const Eigen::VectorXd coef = others.completeOrthogonalDecomposition().solve(target);
        const Eigen::VectorXd resid = target - others * coef;
        const double r2 = 1.0 - resid.squaredNorm() / target.squaredNorm();
        e.value = 1.0 / (1.0 - r2);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<VifEntry> vif(const RegressionFit& fit, std::span<const std::string> exclude) {
    std::vector<Eigen::Index> keep;
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < fit.n_params(); ++j) {
        const auto& label = fit.labels[static_cast<std::size_t>(j)];
        if (label == "Intercept" || std::find(exclude.begin(), exclude.end(), label) != exclude.end()) continue;
        keep.push_back(j);
        names.push_back(label);
    }
    if (keep.size() < 2) return {};
    Eigen::MatrixXd cols(fit.n_obs(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) cols.col(static_cast<Eigen::Index>(c)) = fit.design.col(keep[c]);
    return vif(cols, names);
}

double max_vif(std::span<const VifEntry> entries) {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.value);
    return m;
}

double mackinnon_p(double statistic) {
    const auto& s = adf_constant_surface;
    if (statistic > s.tau_max) return 1.0;
    if (statistic < s.tau_min) return 0.0;
    double z = 0.0;
    if (statistic <= s.tau_star) {
        for (std::size_t i = s.small_p.size(); i-- > 0;) z = z * statistic + s.small_p[i];
    } else {
        for (std::size_t i = s.large_p.size(); i-- > 0;) z = z * statistic + s.large_p[i];
    }
    return normal_cdf(z);
}

namespace {

struct AdfFit {
    double statistic;
    double aic;
    Eigen::Index n_obs;
};

// Regression over dy indices [start, T-2]: dy[t] on 1, y[t], dy[t-1..t-lags].
AdfFit adf_regression(std::span<const double> y, int lags, Eigen::Index start) {
    const auto T = static_cast<Eigen::Index>(y.size());
    const Eigen::Index n = (T - 1) - start;
    auto dy = [&](Eigen::Index t) { return y[static_cast<std::size_t>(t + 1)] - y[static_cast<std::size_t>(t)]; };
    Eigen::MatrixXd X(n, 2 + lags);
    Eigen::VectorXd r(n);
    for (Eigen::Index row = 0; row < n; ++row) {
        const Eigen::Index t = start + row;
        r(row) = dy(t);
        X(row, 0) = 1.0;
        X(row, 1) = y[static_cast<std::size_t>(t)];
        for (int i = 1; i <= lags; ++i) X(row, 1 + i) = dy(t - i);
    }
    if (n <= X.cols()) throw DataError("series too short for the requested ADF lag order");
    auto ls = least_squares(X, r);
    if (!ls.dependent_columns.empty()) throw ZeroVarianceError("ADF regression is singular (constant series?)");
    const double ssr = ls.residuals.squaredNorm();
    const double dof = static_cast<double>(n - X.cols());
    const double se = std::sqrt(ls.xtx_inverse(1, 1) * ssr / dof);
    const double nd = static_cast<double>(n);
    return {ls.coefficients(1) / se, nd * std::log(ssr / nd) + 2.0 * static_cast<double>(X.cols()), n};
}

}  // namespace

AdfResult adf_test(std::span<const double> series, std::optional<int> max_lag) {
    const auto T = static_cast<Eigen::Index>(series.size());
    if (T < 10) throw DataError(fmt::format("ADF test needs at least 10 observations, got {}", T));
    int maxlag = max_lag.value_or(static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25))));
    maxlag = std::clamp<int>(maxlag, 0, static_cast<int>(T / 2 - 2));

    int best = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= maxlag; ++p) {
        const double aic = adf_regression(series, p, maxlag).aic;
        if (aic < best_aic) {
            best_aic = aic;
            best = p;
        }
    }
    const auto fit = adf_regression(series, best, best);
    return {fit.statistic, mackinnon_p(fit.statistic), best, fit.n_obs};
}

std::string_view to_string(KpssBand band) {
    switch (band) {
    case KpssBand::Above10: return ">0.10";
    case KpssBand::From5To10: return "0.05-0.10";
    case KpssBand::From2_5To5: return "0.025-0.05";
    case KpssBand::From1To2_5: return "0.01-0.025";
    case KpssBand::Below1: return "<0.01";
    }
    return "?";
}

KpssResult kpss_test(std::span<const double> series, std::optional<int> bandwidth) {
    const auto T = static_cast<Eigen::Index>(series.size());
    if (T < 10) throw DataError(fmt::format("KPSS test needs at least 10 observations, got {}", T));
    const Eigen::Map<const Eigen::VectorXd> y(series.data(), T);
    const Eigen::VectorXd e = y.array() - y.mean();
    if (e.squaredNorm() == 0.0) throw ZeroVarianceError("KPSS test of a constant series");

    const int L = bandwidth.value_or(default_bandwidth(T));
    if (L < 0 || L >= T) throw std::invalid_argument("KPSS bandwidth must lie in [0, T)");
    double lrv = e.squaredNorm();
    for (int l = 1; l <= L; ++l) {
        const double w = 1.0 - static_cast<double>(l) / static_cast<double>(L + 1);
        lrv += 2.0 * w * e.tail(T - l).dot(e.head(T - l));
    }
    lrv /= static_cast<double>(T);

    double partial = 0.0, eta_num = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
        partial += e(t);
        eta_num += partial * partial;
    }
    KpssResult out;
    out.bandwidth = L;
    out.statistic = eta_num / (static_cast<double>(T) * static_cast<double>(T) * lrv);

    const auto& crit = kpss_level_critical_values;
    const double s = out.statistic;
    if (s < crit[0].value) {
        out.band = KpssBand::Above10;
        out.p_value = crit[0].p;
    } else if (s >= crit.back().value) {
        out.band = KpssBand::Below1;
        out.p_value = crit.back().p;
    } else {
        std::size_t i = 0;
        while (s >= crit[i + 1].value) ++i;
        static constexpr std::array bands{KpssBand::From5To10, KpssBand::From2_5To5, KpssBand::From1To2_5};
        out.band = bands[i];
        const double frac = (s - crit[i].value) / (crit[i + 1].value - crit[i].value);
        out.p_value = crit[i].p + frac * (crit[i + 1].p - crit[i].p);
    }
    return out;
}

JarqueBeraResult jarque_bera(std::span<const double> residuals) {
    const auto n = static_cast<Eigen::Index>(residuals.size());
    if (n < 8) throw DataError(fmt::format("Jarque-Bera test needs at least 8 values, got {}", n));
    const Eigen::Map<const Eigen::ArrayXd> x(residuals.data(), n);
    const Eigen::ArrayXd d = x - x.mean();
    const double nd = static_cast<double>(n);
    const double m2 = d.square().sum() / nd;
    if (m2 == 0.0) throw ZeroVarianceError("Jarque-Bera test of a constant sample");
    const double m3 = d.cube().sum() / nd;
    const double m4 = d.square().square().sum() / nd;
    JarqueBeraResult out;
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);
    out.statistic = nd / 6.0 * (out.skewness * out.skewness + (out.kurtosis - 3.0) * (out.kurtosis - 3.0) / 4.0);
    out.p_value = chi_squared_sf(out.statistic, 2.0);
    return out;
}

DiagnosticsReport diagnose(const RegressionFit& fit, std::span<const std::string> exclude) {
    DiagnosticsReport r;
    const std::span<const double> resid(fit.residuals.data(), static_cast<std::size_t>(fit.residuals.size()));
    r.adf = adf_test(resid);
    r.kpss = kpss_test(resid);
    r.jb = jarque_bera(resid);
    r.vif = vif(fit, exclude);
    return r;
}

}  // namespace emi::stats

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "emi/stats/regression.hpp"

namespace emi::stats {

struct VifEntry {
    std::string name;
    double value = 1.0;      // +inf when collinear
    bool collinear = false;  // perfectly explained by the other columns
};

// VIF_j = 1 / (1 - R^2_j), R^2_j from regressing column j on the others with an
// intercept. Columns are the regressors without the constant. Needs >= 2 columns.
std::vector<VifEntry> vif(const Eigen::MatrixXd& columns, std::span<const std::string> names);

// VIF over a fitted design, skipping the intercept and any labels in `exclude`.
std::vector<VifEntry> vif(const RegressionFit& fit, std::span<const std::string> exclude = {});

double max_vif(std::span<const VifEntry> entries);

struct AdfResult {
    double statistic = 0;
    double p_value = 1;
    int lags = 0;
    Eigen::Index n_obs = 0;
};

// Constant-only MacKinnon response-surface p-value for a Dickey-Fuller t statistic.
double mackinnon_p(double statistic);

// dy_t = a + g y_{t-1} + sum_{i<=p} d_i dy_{t-i} + e_t with p chosen by AIC up to
// max_lag (default floor(12 (T/100)^(1/4)), capped at T/2 - 2). Needs T >= 10.
AdfResult adf_test(std::span<const double> series, std::optional<int> max_lag = std::nullopt);

enum class KpssBand { Above10, From5To10, From2_5To5, From1To2_5, Below1 };
std::string_view to_string(KpssBand band);  // ">0.10", "0.05-0.10", ...

struct KpssResult {
    double statistic = 0;
    KpssBand band = KpssBand::Above10;
    double p_value = 0.1;  // interpolated within the table, clamped to [0.01, 0.10]
    int bandwidth = 0;
};

// Level-stationarity KPSS with a Bartlett long-run variance (default bandwidth
// floor(4 (T/100)^(2/9))). Needs T >= 10; throws ZeroVarianceError on a constant series.
KpssResult kpss_test(std::span<const double> series, std::optional<int> bandwidth = std::nullopt);

struct JarqueBeraResult {
    double statistic = 0;
    double p_value = 1;
    double skewness = 0;
    double kurtosis = 3;
};

// JB = n/6 (S^2 + (K-3)^2/4) with moment estimators, p from chi^2(2). Needs n >= 8.
JarqueBeraResult jarque_bera(std::span<const double> residuals);

struct DiagnosticsReport {
    AdfResult adf;
    KpssResult kpss;
    JarqueBeraResult jb;
    std::vector<VifEntry> vif;
};

// Residual diagnostics and design VIFs (excluding the intercept and `exclude`).
DiagnosticsReport diagnose(const RegressionFit& fit, std::span<const std::string> exclude = {});

}  // namespace emi::stats

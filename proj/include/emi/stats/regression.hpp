#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emi/errors.hpp"
#include "emi/stats/table.hpp"

namespace emi::stats {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct LeastSquares {
    VectorX<Scalar> coefficients;
    VectorX<Scalar> residuals;
    MatrixX<Scalar> xtx_inverse;  // (X'X)^-1
    Eigen::Index rank = 0;
    std::vector<Eigen::Index> dependent_columns;  // non-empty iff rank deficient
};

// Column-pivoted QR least squares. On rank deficiency the coefficient fields
// are left empty and `dependent_columns` lists the columns the pivoting pushed
// past the numerical rank.
template <typename DX, typename DY>
LeastSquares<typename DX::Scalar> least_squares(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DY>& y) {
    using Scalar = typename DX::Scalar;
    LeastSquares<Scalar> out;
    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(X);
    qr.setThreshold(Scalar(1e-10));
    out.rank = qr.rank();
    const Eigen::Index p = X.cols();
    if (out.rank < p) {
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = out.rank; k < p; ++k) out.dependent_columns.push_back(perm(k));
        return out;
    }
    out.coefficients = qr.solve(y.derived());
    out.residuals = y - X * out.coefficients;
    const MatrixX<Scalar> r = qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
    const MatrixX<Scalar> r_inv =
        r.template triangularView<Eigen::Upper>().solve(MatrixX<Scalar>::Identity(p, p));
    const MatrixX<Scalar> permuted = r_inv * r_inv.transpose();
    out.xtx_inverse = qr.colsPermutation() * permuted * qr.colsPermutation().transpose();
    return out;
}

// Bartlett-kernel long-run "meat" matrix
//   S = G_0 + sum_{l=1}^{L} (1 - l/(L+1)) (G_l + G_l'),  G_l = sum_t e_t e_{t-l} x_t x_{t-l}'.
template <typename DX, typename DE>
MatrixX<typename DX::Scalar> newey_west_meat(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DE>& resid,
                                             int bandwidth) {
    using Scalar = typename DX::Scalar;
    const Eigen::Index T = X.rows();
    const MatrixX<Scalar> scores = X.array().colwise() * resid.array();
    MatrixX<Scalar> meat = scores.transpose() * scores;
    for (int l = 1; l <= bandwidth; ++l) {
        const Scalar w = Scalar(1) - Scalar(l) / Scalar(bandwidth + 1);
        const MatrixX<Scalar> gamma = scores.bottomRows(T - l).transpose() * scores.topRows(T - l);
        meat += w * (gamma + gamma.transpose());
    }
    return meat;
}

// Sandwich (X'X)^-1 S (X'X)^-1 without small-sample correction; bandwidth 0 gives White (HC0).
template <typename DX, typename DE, typename DB>
MatrixX<typename DX::Scalar> newey_west_covariance(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DE>& resid,
                                                   const Eigen::MatrixBase<DB>& xtx_inverse, int bandwidth) {
    return xtx_inverse * newey_west_meat(X, resid, bandwidth) * xtx_inverse;
}

// floor(4 (T/100)^(2/9))
int default_bandwidth(Eigen::Index n_obs);

struct Term {
    std::string column;
    int lag = 0;

    std::string label() const;  // "EMI(t-1)", "Pol(t)"
    bool operator==(const Term&) const = default;
};

struct Interaction {
    Term first;
    Term second;

    std::string label() const;  // "EMI(t-1)*Pol(t-1)"
    bool operator==(const Interaction&) const = default;
};

struct RegressionSpec {
    std::string name;
    Term dependent;
    std::vector<Term> terms;
    std::vector<Interaction> interactions;
    bool include_intercept = true;

    // Coefficient labels in design order; "Intercept" first when included.
    std::vector<std::string> labels() const;
    // Throws std::invalid_argument on duplicate terms or negative lags.
    void validate() const;
};

struct RegressionFit {
    std::string name;
    std::vector<std::string> labels;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd se;  // classical OLS
    Eigen::VectorXd t;
    Eigen::VectorXd p;
    Eigen::VectorXd hac_se;
    Eigen::VectorXd hac_p;
    int hac_bandwidth = 0;
    double r_squared = 0;
    double adj_r_squared = 0;
    double f_statistic = 0;
    double f_p = 1;
    double sigma = 0;  // residual standard error
    bool has_intercept = true;
    Eigen::VectorXd residuals;
    Eigen::VectorXd response;
    Eigen::MatrixXd design;
    Eigen::MatrixXd xtx_inverse;
    std::vector<int> sessions;  // index values of the rows used

    Eigen::Index n_obs() const { return design.rows(); }
    Eigen::Index n_params() const { return design.cols(); }
    // Position of a coefficient label; throws std::out_of_range.
    Eigen::Index position(std::string_view label) const;
    double coefficient(std::string_view label) const { return coefficients(position(label)); }
};

struct HacResult {
    Eigen::VectorXd se;
    Eigen::VectorXd p;
    int bandwidth = 0;
};

// OLS on an explicit design. Throws SingularDesignError naming collinear
// columns, DataError when n_obs <= n_params. HAC fields use the default bandwidth.
RegressionFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::string> labels,
                      bool has_intercept);

// Builds the lagged design from the table with listwise deletion of rows
// having any missing term, then fits.
RegressionFit ols_fit(const RegressionSpec& spec, const TimeSeriesTable& table);

struct Design {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> labels;
    std::vector<int> sessions;
};
Design build_design(const RegressionSpec& spec, const TimeSeriesTable& table);

// Newey-West standard errors and t(n-k) p-values. Throws std::invalid_argument
// when bandwidth >= n_obs or bandwidth < 0.
HacResult hac_se(const RegressionFit& fit, std::optional<int> bandwidth = std::nullopt);

}  // namespace emi::stats

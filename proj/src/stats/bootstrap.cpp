#include "emi/stats/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include <fmt/core.h>

#include "emi/errors.hpp"
#include "emi/stats/descriptive.hpp"

namespace emi::stats {

BootstrapCoefResult bootstrap_coef(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Eigen::Index coef,
                                   const BootstrapCoefOptions& opts) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (coef < 0 || coef >= p) throw std::out_of_range("bootstrap coefficient index out of range");
    if (opts.n_boot < 1) throw std::invalid_argument("n_boot must be positive");
    if (!(opts.level > 0.0 && opts.level < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
    auto base = least_squares(X, y);
    if (!base.dependent_columns.empty()) throw SingularDesignError("bootstrap base fit is singular", {});

    constexpr double kFailed = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> draws(static_cast<std::size_t>(opts.n_boot), kFailed);

    auto run = [&](int first, int last) {
        Eigen::MatrixXd Xb(n, p);
        Eigen::VectorXd yb(n);
        std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
        for (int b = first; b < last; ++b) {
            std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                              static_cast<std::uint32_t>(b)};
            std::mt19937_64 rng(seq);
            for (Eigen::Index i = 0; i < n; ++i) {
                const Eigen::Index r = pick(rng);
                Xb.row(i) = X.row(r);
                yb(i) = y(r);
            }
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xb);
            qr.setThreshold(1e-10);
            if (qr.rank() < p) continue;
            draws[static_cast<std::size_t>(b)] = qr.solve(yb)(coef);
        }
    };

    const int threads = std::clamp(opts.threads, 1, opts.n_boot);
    if (threads == 1) {
        run(0, opts.n_boot);
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(run, opts.n_boot * t / threads, opts.n_boot * (t + 1) / threads);
    }

    BootstrapCoefResult out;
    out.estimate = base.coefficients(coef);
    out.n_boot = opts.n_boot;
    for (double d : draws) {
        if (std::isnan(d))
            ++out.n_failed;
        else
            out.replicates.push_back(d);
    }
    if (out.n_failed > opts.max_failure_rate * opts.n_boot)
        throw NumericalError(fmt::format("{} of {} bootstrap replicates were rank deficient", out.n_failed, opts.n_boot));
    std::vector<double> sorted = out.replicates;
    std::sort(sorted.begin(), sorted.end());
    const double tail = (1.0 - opts.level) / 2.0;
    out.ci_low = quantile_sorted(sorted, tail);
    out.ci_high = quantile_sorted(sorted, 1.0 - tail);
    return out;
}

BootstrapCoefResult bootstrap_coef(const RegressionSpec& spec, const TimeSeriesTable& table,
                                   std::string_view coef_label, const BootstrapCoefOptions& opts) {
    const auto d = build_design(spec, table);
    auto it = std::find(d.labels.begin(), d.labels.end(), coef_label);
    if (it == d.labels.end()) throw std::out_of_range(fmt::format("no coefficient '{}'", coef_label));
    if (d.X.rows() <= d.X.cols())
        throw DataError(fmt::format("bootstrap needs more observations than parameters ({} <= {})", d.X.rows(),
                                    d.X.cols()));
    return bootstrap_coef(d.X, d.y, static_cast<Eigen::Index>(it - d.labels.begin()), opts);
}

}  // namespace emi::stats

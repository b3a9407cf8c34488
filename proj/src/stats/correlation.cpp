#include "emi/stats/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

#include "emi/errors.hpp"
#include "emi/stats/distributions.hpp"

namespace emi::stats {

Correlation pearson_ci(std::span<const double> x, std::span<const double> y, double level) {
    if (x.size() != y.size()) throw std::invalid_argument("correlation inputs differ in length");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isfinite(x[i]) && std::isfinite(y[i])) {
            xs.push_back(x[i]);
            ys.push_back(y[i]);
        }
    }
    const std::size_t n = xs.size();
    if (n < 4) throw DataError(fmt::format("correlation needs at least 4 complete pairs, got {}", n));

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx += xs[i], my += ys[i];
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ZeroVarianceError("correlation of a constant series");

    Correlation c;
    c.n = n;
    c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double nd = static_cast<double>(n);
    if (std::abs(c.r) == 1.0) {
        c.ci_low = c.ci_high = c.r;
        c.p = 0.0;
        return c;
    }
    const double z = std::atanh(c.r);
    const double half = normal_quantile(0.5 + level / 2.0) / std::sqrt(nd - 3.0);
    c.ci_low = std::tanh(z - half);
    c.ci_high = std::tanh(z + half);
    c.p = t_two_sided_p(c.r * std::sqrt((nd - 2.0) / (1.0 - c.r * c.r)), nd - 2.0);
    return c;
}

const LaggedCorrelation& CrossCorrelation::peak() const {
    for (const auto& l : lags)
        if (l.lag == peak_lag) return l;
    throw std::logic_error("cross-correlation has no usable lag");
}

CrossCorrelation lagged_crosscorr(std::span<const double> x, std::span<const double> y, int max_lag,
                                  double level) {
    if (x.size() != y.size()) throw std::invalid_argument("cross-correlation inputs differ in length");
    if (max_lag < 0) throw std::invalid_argument("max_lag must be non-negative");
    const auto n = static_cast<long>(x.size());
    CrossCorrelation out;
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        std::vector<double> xs, ys;
        for (long t = 0; t < n; ++t) {
            const long u = t + lag;
            if (u < 0 || u >= n) continue;
            xs.push_back(x[static_cast<std::size_t>(t)]);
            ys.push_back(y[static_cast<std::size_t>(u)]);
        }
        try {
            out.lags.push_back({lag, pearson_ci(xs, ys, level)});
        } catch (const DataError& e) {
            out.warnings.push_back(fmt::format("lag {} omitted: {}", lag, e.what()));
        } catch (const ZeroVarianceError& e) {
            out.warnings.push_back(fmt::format("lag {} omitted: {}", lag, e.what()));
        }
    }
    if (out.lags.empty()) throw DataError("no lag has enough overlapping observations");
    const LaggedCorrelation* best = &out.lags.front();
    for (const auto& l : out.lags) {
        const double a = std::abs(l.corr.r), b = std::abs(best->corr.r);
        if (a > b || (a == b && std::abs(l.lag) < std::abs(best->lag))) best = &l;
    }
    out.peak_lag = best->lag;
    return out;
}

}  // namespace emi::stats

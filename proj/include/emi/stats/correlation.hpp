#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace emi::stats {

struct Correlation {
    double r = 0;
    double ci_low = 0;
    double ci_high = 0;
    double p = 1;
    std::size_t n = 0;
};

// Pearson r over the pairs where both values are finite, Fisher-z confidence
// interval and two-sided t-test p. Needs n >= 4; throws ZeroVarianceError on a
// constant input.
Correlation pearson_ci(std::span<const double> x, std::span<const double> y, double level = 0.95);

struct LaggedCorrelation {
    int lag = 0;
    Correlation corr;
};

struct CrossCorrelation {
    std::vector<LaggedCorrelation> lags;  // ascending lag, omitted lags absent
    std::vector<std::string> warnings;
    int peak_lag = 0;  // argmax |r|, ties resolved towards the smaller |lag|

    const LaggedCorrelation& peak() const;
};

// For lag l in [-max_lag, max_lag], correlates x_t with y_{t+l} over the
// overlapping window. Lags with fewer than 4 usable pairs (or a constant
// window) are omitted with a warning.
CrossCorrelation lagged_crosscorr(std::span<const double> x, std::span<const double> y, int max_lag,
                                  double level = 0.95);

}  // namespace emi::stats

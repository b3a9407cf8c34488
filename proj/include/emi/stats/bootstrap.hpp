#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "emi/stats/regression.hpp"
#include "emi/stats/table.hpp"

namespace emi::stats {

struct BootstrapCoefOptions {
    int n_boot = 10000;
    std::uint64_t seed = 1;
    double level = 0.95;
    int threads = 1;
    double max_failure_rate = 0.01;  // rank-deficient replicates tolerated
};

struct BootstrapCoefResult {
    double estimate = 0;  // full-sample coefficient
    double ci_low = 0;
    double ci_high = 0;
    int n_boot = 0;
    int n_failed = 0;
    std::vector<double> replicates;  // successful replicates in replicate order
};

// Case-resampling bootstrap of the rows of an aligned design. Replicate b draws
// its rows from its own stream seeded with (seed, b), so the result does not
// depend on the thread count. Throws NumericalError when more than
// max_failure_rate of the replicates are rank deficient.
BootstrapCoefResult bootstrap_coef(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Eigen::Index coef,
                                   const BootstrapCoefOptions& opts = {});

BootstrapCoefResult bootstrap_coef(const RegressionSpec& spec, const TimeSeriesTable& table,
                                   std::string_view coef_label, const BootstrapCoefOptions& opts = {});

}  // namespace emi::stats

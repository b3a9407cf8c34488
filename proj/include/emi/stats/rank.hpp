#pragma once

#include <cstddef>
#include <span>

namespace emi::stats {

struct MannWhitneyResult {
    double u = 0;  // U of the first sample: pairs (a_i, b_j) with a_i > b_j, ties count 1/2
    double p = 1;  // two-sided
    double median_a = 0;
    double median_b = 0;
    bool exact = false;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
};

// Rank-sum test with midranks for ties. Both samples of size <= 20: exact
// permutation distribution of the (midrank) rank sum. Otherwise normal
// approximation with tie and continuity corrections.
MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b);

// Probability that a positive outscores a negative, ties counting 1/2.
// Labels are 0/1; throws DataError when a class is missing.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace emi::stats

#pragma once

#include <span>
#include <vector>

namespace emi::stats {

double mean(std::span<const double> x);
// 1/N standard deviation.
double population_sd(std::span<const double> x);
// 1/(N-1) standard deviation.
double sample_sd(std::span<const double> x);
double median(std::span<const double> x);

// Linear-interpolation quantile of a sorted sample (the default in R and numpy).
double quantile_sorted(std::span<const double> sorted, double q);
double quantile(std::span<const double> x, double q);

// Midranks (1-based), ties share their average rank.
std::vector<double> midranks(std::span<const double> x);

}  // namespace emi::stats

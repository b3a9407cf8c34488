#pragma once

// Published asymptotic tables used by the unit-root and stationarity tests.
// Bump the version when any number here changes; it is written into manifests.

#include <array>

namespace emi::stats {

inline constexpr int critical_values_version = 1;

// MacKinnon (1994) response surface, Dickey-Fuller with a constant, one series.
struct AdfSurface {
    double tau_max;
    double tau_min;
    double tau_star;
    std::array<double, 3> small_p;  // polynomial in tau, ascending powers
    std::array<double, 4> large_p;
};

inline constexpr AdfSurface adf_constant_surface{
    2.74, -18.83, -1.61, {2.1659, 1.4412, 0.038269}, {1.7339, 0.93202, -0.12745, -0.010368}};

struct CriticalValue {
    double value;
    double p;
};

// KPSS level stationarity (Kwiatkowski et al. 1992), ascending statistic.
inline constexpr std::array<CriticalValue, 4> kpss_level_critical_values{
    {{0.347, 0.10}, {0.463, 0.05}, {0.574, 0.025}, {0.739, 0.01}}};

}  // namespace emi::stats

#pragma once

namespace emi::stats {

double normal_cdf(double x);
double normal_quantile(double p);
// Two-sided p-value of a t statistic with `dof` degrees of freedom.
double t_two_sided_p(double t, double dof);
double chi_squared_sf(double x, double dof);
double f_sf(double x, double dof1, double dof2);

}  // namespace emi::stats

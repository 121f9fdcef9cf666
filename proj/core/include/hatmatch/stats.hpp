#pragma once

#include <string>

namespace hatmatch {

// Two-sided p-values.
double p_value_t(double t_stat, double dof);
double p_value_normal(double z);
double normal_quantile(double p);

// "*" p<0.05, "**" p<0.01, "***" p<0.001.
std::string significance_stars(double p);

// Table cell such as "0.9028*** (0.2033)".
std::string format_coef_cell(double coef, double se, double p, int precision = 4);

}  // namespace hatmatch

#include "hatmatch/stats.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>

namespace hatmatch {

double p_value_t(double t_stat, double dof) {
  if (!std::isfinite(t_stat)) return std::isnan(t_stat) ? t_stat : 0.0;
  if (!(dof > 0.0)) return p_value_normal(t_stat);
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t_stat)));
}

double p_value_normal(double z) {
  if (!std::isfinite(z)) return std::isnan(z) ? z : 0.0;
  boost::math::normal dist;
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(z)));
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

std::string significance_stars(double p) {
  if (std::isnan(p)) return "";
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::string format_coef_cell(double coef, double se, double p, int precision) {
  if (std::isnan(coef)) return "";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*f%s (%.*f)", precision, coef, significance_stars(p).c_str(),
                precision, se);
  return buf;
}

}  // namespace hatmatch

#include "hatmatch/fixed_effects.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "hatmatch/error.hpp"

namespace hatmatch {

std::string to_string(SeType t) {
  switch (t) {
    case SeType::Classical: return "classical";
    case SeType::Robust: return "robust";
    case SeType::Clustered: return "clustered";
  }
  return "clustered";
}

SeType parse_se_type(const std::string& s) {
  if (s == "classical") return SeType::Classical;
  if (s == "robust") return SeType::Robust;
  if (s == "clustered") return SeType::Clustered;
  throw InvalidInput("unknown SE type '" + s + "' (expected classical, robust or clustered)");
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int count_levels(const std::vector<int>& ids) {
  return ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
}

// Weighted two-way demeaning by alternating projections; converges to the
// projection onto the complement of the fixed-effect space.
void demean(VectorXd& v, const FeDesign& d, int n_units, int n_periods) {
  const int n = static_cast<int>(v.size());
  std::vector<double> wsum_u(n_units, 0.0), wsum_t(n_periods, 0.0);
  for (int i = 0; i < n; ++i) {
    wsum_u[d.unit[i]] += d.weights[i];
    wsum_t[d.period[i]] += d.weights[i];
  }
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  std::vector<double> acc_u(n_units), acc_t(n_periods);
  for (int iter = 0; iter < 20000; ++iter) {
    std::fill(acc_u.begin(), acc_u.end(), 0.0);
    for (int i = 0; i < n; ++i) acc_u[d.unit[i]] += d.weights[i] * v(i);
    for (int i = 0; i < n; ++i) v(i) -= acc_u[d.unit[i]] / wsum_u[d.unit[i]];
    std::fill(acc_t.begin(), acc_t.end(), 0.0);
    for (int i = 0; i < n; ++i) acc_t[d.period[i]] += d.weights[i] * v(i);
    double change = 0.0;
    for (int t = 0; t < n_periods; ++t) change = std::max(change, std::abs(acc_t[t] / wsum_t[t]));
    for (int i = 0; i < n; ++i) v(i) -= acc_t[d.period[i]] / wsum_t[d.period[i]];
    if (change < 1e-14 * scale) break;
  }
}

struct Core {
  VectorXd coef;
  VectorXd residual;
  MatrixXd influence;  // k x n: rows of (X'WX)^{-1} X'W for the regressors
};

Core solve_within(const FeDesign& d, int n_units, int n_periods) {
  const int n = static_cast<int>(d.y.size());
  const int k = static_cast<int>(d.regressors.size());
  VectorXd y = Eigen::Map<const VectorXd>(d.y.data(), n);
  demean(y, d, n_units, n_periods);
  MatrixXd X(n, k);
  for (int j = 0; j < k; ++j) {
    VectorXd col = Eigen::Map<const VectorXd>(d.regressors[j].data(), n);
    const double before = col.squaredNorm();
    demean(col, d, n_units, n_periods);
    if (before == 0.0 || col.squaredNorm() <= 1e-20 * std::max(before, 1.0))
      throw DegenerateFitError(d.regressor_names[j],
                               "regressor '" + d.regressor_names[j] +
                                   "' is collinear with the fixed effects");
    X.col(j) = col;
  }
  const VectorXd w = Eigen::Map<const VectorXd>(d.weights.data(), n);
  const MatrixXd XtW = X.transpose() * w.asDiagonal();
  const MatrixXd xtwx = XtW * X;
  Eigen::FullPivLU<MatrixXd> lu(xtwx);
  if (lu.rank() < k) {
    throw DegenerateFitError(d.regressor_names[static_cast<std::size_t>(lu.rank())],
                             "regressors are collinear after removing fixed effects");
  }
  Core c;
  c.influence = lu.solve(XtW);
  c.coef = c.influence * y;
  c.residual = y - X * c.coef;
  return c;
}

Core solve_dummy(const FeDesign& d, int n_units, int n_periods) {
  const int n = static_cast<int>(d.y.size());
  const int k = static_cast<int>(d.regressors.size());
  const int p = k + n_units + (n_periods - 1);
  MatrixXd X = MatrixXd::Zero(n, p);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = d.regressors[j][i];
  for (int i = 0; i < n; ++i) {
    X(i, k + d.unit[i]) = 1.0;
    if (d.period[i] > 0) X(i, k + n_units + d.period[i] - 1) = 1.0;
  }
  const VectorXd w = Eigen::Map<const VectorXd>(d.weights.data(), n);
  const VectorXd sw = w.cwiseSqrt();
  const MatrixXd Xs = sw.asDiagonal() * X;
  const VectorXd y = Eigen::Map<const VectorXd>(d.y.data(), n);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(Xs);
  if (qr.rank() < p) {
    // Identify the first regressor whose removal restores full rank.
    for (int j = 0; j < k; ++j) {
      MatrixXd reduced(n, p - 1);
      reduced << Xs.leftCols(j), Xs.rightCols(p - j - 1);
      if (Eigen::ColPivHouseholderQR<MatrixXd>(reduced).rank() == p - 1)
        throw DegenerateFitError(d.regressor_names[j],
                                 "regressor '" + d.regressor_names[j] +
                                     "' is collinear with the fixed effects");
    }
    throw DegenerateFitError("fixed_effects", "fixed-effect design is rank deficient");
  }
  // (X'WX)^{-1} X'W = (Xs'Xs)^{-1} Xs' diag(sqrt w).
  const MatrixXd xtwx = Xs.transpose() * Xs;
  const MatrixXd inv = xtwx.ldlt().solve(MatrixXd::Identity(p, p));
  const MatrixXd H = inv.topRows(k) * Xs.transpose() * sw.asDiagonal();
  Core c;
  const VectorXd beta = qr.solve(sw.cwiseProduct(y));
  c.coef = beta.head(k);
  c.residual = y - X * beta;
  c.influence = H;
  return c;
}

}  // namespace

FeResult fit_two_way_fe(const FeDesign& d, SeType se_type, FeSolver solver) {
  const int n = static_cast<int>(d.y.size());
  const int k = static_cast<int>(d.regressors.size());
  if (d.weights.size() != d.y.size() || d.unit.size() != d.y.size() ||
      d.period.size() != d.y.size() || d.cluster.size() != d.y.size())
    throw InvalidInput("fixed-effects design vectors differ in length");
  if (d.regressor_names.size() != d.regressors.size())
    throw InvalidInput("one name per regressor required");
  for (double w : d.weights)
    if (!(w > 0.0)) throw InvalidInput("regression weights must be positive");

  FeResult r;
  r.n_obs = n;
  r.n_units = count_levels(d.unit);
  r.n_periods = count_levels(d.period);
  r.n_clusters = count_levels(d.cluster);
  if (r.n_units < 2) throw DegenerateFitError("units", "need at least two scientists");
  if (r.n_periods < 2) throw DegenerateFitError("periods", "need at least two periods");

  const Core c = solver == FeSolver::Within ? solve_within(d, r.n_units, r.n_periods)
                                            : solve_dummy(d, r.n_units, r.n_periods);

  const VectorXd w = Eigen::Map<const VectorXd>(d.weights.data(), n);
  double wsum = w.sum(), ybar = 0.0;
  for (int i = 0; i < n; ++i) ybar += d.weights[i] * d.y[i];
  ybar /= wsum;
  double sst = 0.0;
  for (int i = 0; i < n; ++i) sst += d.weights[i] * (d.y[i] - ybar) * (d.y[i] - ybar);
  r.ssr = (w.array() * c.residual.array().square()).sum();
  r.zero_variance = sst <= 0.0;
  r.r2 = r.zero_variance ? 0.0 : 1.0 - r.ssr / sst;

  const double full_params = k + r.n_units + r.n_periods - 1;
  MatrixXd V(k, k);
  if (se_type == SeType::Classical) {
    r.dof = n - full_params;
    const double sigma2 = r.dof > 0 ? r.ssr / r.dof : 0.0;
    // (X'WX)^{-1} = H W^{-1} H' restricted to the regressor block.
    MatrixXd Hw = c.influence * w.cwiseInverse().asDiagonal();
    V = sigma2 * (Hw * c.influence.transpose());
  } else if (se_type == SeType::Robust) {
    r.dof = n - full_params;
    MatrixXd He = c.influence * c.residual.asDiagonal();
    const double factor = r.dof > 0 ? n / r.dof : 1.0;
    V = factor * (He * He.transpose());
  } else {
    MatrixXd scores = MatrixXd::Zero(k, r.n_clusters);
    for (int i = 0; i < n; ++i) scores.col(d.cluster[i]) += c.influence.col(i) * c.residual(i);
    const int g = r.n_clusters;
    const double small_k = k + r.n_periods;  // unit effects are nested in clusters
    const double factor = g > 1 && n > small_k
                              ? (static_cast<double>(g) / (g - 1)) * ((n - 1.0) / (n - small_k))
                              : 1.0;
    V = factor * (scores * scores.transpose());
    r.dof = g - 1;
  }
  r.coef.assign(c.coef.data(), c.coef.data() + k);
  r.vcov.assign(k, std::vector<double>(k));
  r.se.resize(k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) r.vcov[a][b] = V(a, b);
    r.se[a] = std::sqrt(std::max(V(a, a), 0.0));
  }
  return r;
}

}  // namespace hatmatch

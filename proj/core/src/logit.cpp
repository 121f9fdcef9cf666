#include "hatmatch/logit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "hatmatch/csv.hpp"
#include "hatmatch/error.hpp"
#include "hatmatch/stats.hpp"

namespace hatmatch {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double logistic(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

int LogitEstimate::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

namespace {

double softplus(double eta) { return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

double log_likelihood(const MatrixXd& X, const VectorXd& y, const VectorXd& beta) {
  const VectorXd eta = X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y(i) * eta(i) - softplus(eta(i));
  return ll;
}

// Index of the first column that is a linear combination of earlier ones, or -1.
int first_aliased(const MatrixXd& X, std::vector<int>* keep = nullptr) {
  std::vector<int> kept;
  int first = -1;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const VectorXd col = X.col(j);
    const double norm = col.norm();
    bool aliased = norm == 0.0;
    if (!aliased && !kept.empty()) {
      MatrixXd K(X.rows(), static_cast<Eigen::Index>(kept.size()));
      for (std::size_t c = 0; c < kept.size(); ++c) K.col(static_cast<Eigen::Index>(c)) = X.col(kept[c]);
      const VectorXd coef = K.colPivHouseholderQr().solve(col);
      aliased = (col - K * coef).norm() <= 1e-9 * norm;
    }
    if (aliased) {
      if (first < 0) first = static_cast<int>(j);
    } else {
      kept.push_back(static_cast<int>(j));
    }
  }
  if (keep) *keep = kept;
  return first;
}

// Predictor with the largest |beta_j| * sd(x_j), so column scale does not decide.
int largest_slope(const MatrixXd& X, const VectorXd& beta, const std::vector<std::string>& names) {
  int best = -1;
  double best_size = -1.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (names[static_cast<std::size_t>(j)] == "(Intercept)") continue;
    const double mean = X.col(j).mean();
    const double sd = std::sqrt((X.col(j).array() - mean).square().mean());
    const double size = std::abs(beta(j)) * sd;
    if (size > best_size) {
      best = static_cast<int>(j);
      best_size = size;
    }
  }
  return best < 0 ? 0 : best;
}

LogitEstimate irls(const MatrixXd& X, const VectorXd& y, const std::vector<std::string>& names,
                   const LogitOptions& options) {
  const Eigen::Index n = X.rows(), p = X.cols();
  double n1 = y.sum();
  if (n == 0 || n1 == 0.0 || n1 == static_cast<double>(n))
    throw InvalidInput("logit needs at least one row in each outcome class");

  LogitEstimate est;
  est.names = names;
  est.n_obs = static_cast<int>(n);
  VectorXd beta = VectorXd::Zero(p);
  double ll = log_likelihood(X, y, beta);
  est.loglik_history.push_back(ll);

  auto separation = [&](const char* why) {
    const int j = largest_slope(X, beta, names);
    throw SeparationError(names[static_cast<std::size_t>(j)],
                          std::string("logit ") + why + "; separating predictor '" +
                              names[static_cast<std::size_t>(j)] + "'");
  };

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const VectorXd eta = X * beta;
    VectorXd mu(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      mu(i) = logistic(eta(i));
      w(i) = mu(i) * (1.0 - mu(i));
    }
    const VectorXd grad = X.transpose() * (y - mu);
    const MatrixXd info = X.transpose() * w.asDiagonal() * X;
    const VectorXd step = info.completeOrthogonalDecomposition().solve(grad);
    if (grad.dot(step) < 1e-20) {
      est.converged = true;
      est.iterations = iter - 1;
      break;
    }
    double scale = 1.0;
    bool accepted = false;
    VectorXd candidate;
    double ll_candidate = ll;
    for (int halving = 0; halving < 50; ++halving) {
      candidate = beta + scale * step;
      ll_candidate = log_likelihood(X, y, candidate);
      if (std::isfinite(ll_candidate) && ll_candidate >= ll) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    est.iterations = iter;
    if (!accepted) {
      // No ascent left at machine precision.
      est.converged = true;
      break;
    }
    const double gain = ll_candidate - ll;
    beta = candidate;
    ll = ll_candidate;
    est.loglik_history.push_back(ll);
    if (beta.cwiseAbs().maxCoeff() > options.divergence) separation("coefficients diverge");
    if (gain < options.tol) {
      est.converged = true;
      break;
    }
  }
  if (ll > -1e-6) separation("fits the labels perfectly (complete separation)");

  const VectorXd eta = X * beta;
  VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = logistic(eta(i));
    w(i) = mu * (1.0 - mu);
    if (mu < 1e-8 || mu > 1.0 - 1e-8) est.quasi_separation = true;
  }
  const MatrixXd info = X.transpose() * w.asDiagonal() * X;
  const MatrixXd vcov = info.completeOrthogonalDecomposition().pseudoInverse();

  est.coef.assign(beta.data(), beta.data() + p);
  est.vcov.assign(static_cast<std::size_t>(p), std::vector<double>(static_cast<std::size_t>(p)));
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = 0; b < p; ++b) est.vcov[a][b] = vcov(a, b);
    const double se = std::sqrt(std::max(0.0, vcov(a, a)));
    est.se.push_back(se);
    est.p.push_back(se > 0.0 ? p_value_normal(beta(a) / se) : (beta(a) == 0.0 ? 1.0 : 0.0));
  }
  est.loglik = ll;
  const double ybar = n1 / static_cast<double>(n);
  est.loglik_null = n1 * std::log(ybar) + (static_cast<double>(n) - n1) * std::log1p(-ybar);
  est.pseudo_r2 = 1.0 - est.loglik / est.loglik_null;
  return est;
}

struct FactorSpec {
  const char* name;
  std::function<const std::string&(const LogitDesignRow&)> get;
};

}  // namespace

LogitEstimate logit_fit_matrix(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                               const std::vector<std::string>& names, const LogitOptions& options) {
  if (x.size() != y.size()) throw InvalidInput("logit design and label lengths differ");
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index p = static_cast<Eigen::Index>(names.size());
  MatrixXd X(n, p);
  VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (x[i].size() != names.size()) throw InvalidInput("logit design row has the wrong width");
    if (y[i] != 0 && y[i] != 1) throw InvalidInput("logit labels must be 0 or 1");
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = x[i][j];
    Y(i) = y[i];
  }
  if (const int j = first_aliased(X); j >= 0)
    throw DegenerateFitError(names[j], "logit column '" + names[j] + "' is aliased");
  return irls(X, Y, names, options);
}

LogitEstimate logit_fit(std::span<const LogitDesignRow> rows, const LogitOptions& options) {
  const std::vector<std::string> continuous{"D_A", "D_I", "D_C", "D_size"};
  const std::vector<FactorSpec> specs{
      {"Y_0", [](const LogitDesignRow& r) -> const std::string& { return r.y0; }},
      {"Y_w", [](const LogitDesignRow& r) -> const std::string& { return r.y_w; }},
      {"discipline", [](const LogitDesignRow& r) -> const std::string& { return r.discipline; }},
      {"group", [](const LogitDesignRow& r) -> const std::string& { return r.group; }}};

  std::vector<std::string> log;
  std::vector<LogitFactor> factors;
  std::vector<std::vector<std::string>> coded(specs.size());
  for (std::size_t f = 0; f < specs.size(); ++f) {
    std::map<std::string, int> counts;
    for (const auto& r : rows) ++counts[specs[f].get(r)];
    LogitFactor factor;
    factor.name = specs[f].name;
    for (const auto& [level, count] : counts) {
      if (count < options.min_level_rows) {
        factor.collapsed.push_back(level);
        log.push_back("collapsed " + factor.name + "=" + level + " into other");
      }
    }
    std::map<std::string, int> coded_counts;
    for (const auto& r : rows) {
      const std::string& level = specs[f].get(r);
      const bool rare = counts[level] < options.min_level_rows;
      coded[f].push_back(rare ? "other" : level);
      ++coded_counts[coded[f].back()];
    }
    int best = -1;
    for (const auto& [level, count] : coded_counts) {
      factor.levels.push_back(level);
      if (count > best) {
        best = count;
        factor.mode = level;
      }
    }
    factors.push_back(std::move(factor));
  }

  std::vector<std::string> names{"(Intercept)"};
  names.insert(names.end(), continuous.begin(), continuous.end());
  for (const auto& f : factors)
    for (std::size_t l = 1; l < f.levels.size(); ++l) names.push_back(f.name + "=" + f.levels[l]);

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  MatrixXd X = MatrixXd::Zero(n, static_cast<Eigen::Index>(names.size()));
  VectorXd Y(n);
  std::vector<double> means(4, 0.0), mins(4, INFINITY), maxs(4, -INFINITY);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    if (r.label != 0 && r.label != 1) throw InvalidInput("logit labels must be 0 or 1");
    const double v[4] = {r.d_a, r.d_i, r.d_c, r.d_size};
    X(i, 0) = 1.0;
    for (int c = 0; c < 4; ++c) {
      if (!std::isfinite(v[c]))
        throw InvalidInput("non-finite " + continuous[c] + " for " + r.author_id);
      X(i, 1 + c) = v[c];
      means[c] += v[c];
      mins[c] = std::min(mins[c], v[c]);
      maxs[c] = std::max(maxs[c], v[c]);
    }
    Eigen::Index col = 5;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const auto& levels = factors[f].levels;
      for (std::size_t l = 1; l < levels.size(); ++l, ++col)
        if (coded[f][static_cast<std::size_t>(i)] == levels[l]) X(i, col) = 1.0;
    }
    Y(i) = r.label;
  }
  if (n > 0)
    for (auto& m : means) m /= static_cast<double>(n);

  std::vector<int> keep;
  if (first_aliased(X, &keep) >= 0) {
    MatrixXd reduced(n, static_cast<Eigen::Index>(keep.size()));
    std::vector<std::string> kept_names;
    std::size_t next = 0;
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (next < keep.size() && keep[next] == static_cast<int>(j)) {
        reduced.col(static_cast<Eigen::Index>(next)) = X.col(static_cast<Eigen::Index>(j));
        kept_names.push_back(names[j]);
        ++next;
      } else {
        log.push_back("dropped aliased column " + names[j]);
      }
    }
    X = std::move(reduced);
    names = std::move(kept_names);
  }

  LogitEstimate est = irls(X, Y, names, options);
  est.continuous = continuous;
  est.means = means;
  est.mins = mins;
  est.maxs = maxs;
  est.factors = std::move(factors);
  est.log = std::move(log);
  return est;
}

namespace {

// Profile row: intercept 1, continuous at means, factors at their modes.
std::vector<double> profile(const LogitEstimate& est) {
  std::vector<double> x(est.names.size(), 0.0);
  for (std::size_t j = 0; j < est.names.size(); ++j) {
    const std::string& name = est.names[j];
    if (name == "(Intercept)") {
      x[j] = 1.0;
      continue;
    }
    auto c = std::find(est.continuous.begin(), est.continuous.end(), name);
    if (c != est.continuous.end()) {
      x[j] = est.means[static_cast<std::size_t>(c - est.continuous.begin())];
      continue;
    }
    for (const auto& f : est.factors)
      if (name == f.name + "=" + f.mode) x[j] = 1.0;
  }
  return x;
}

MarginPoint predict(const LogitEstimate& est, const std::vector<double>& x) {
  double eta = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) eta += est.coef[j] * x[j];
  double quad = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = 0; b < x.size(); ++b) quad += x[a] * est.vcov[a][b] * x[b];
  MarginPoint m;
  m.probability = logistic(eta);
  const double half = 1.96 * m.probability * (1.0 - m.probability) * std::sqrt(std::max(0.0, quad));
  m.ci_lo = std::max(0.0, m.probability - half);
  m.ci_hi = std::min(1.0, m.probability + half);
  return m;
}

}  // namespace

std::vector<MarginPoint> margins(const LogitEstimate& est, const std::string& predictor,
                                 std::span<const double> grid) {
  auto c = std::find(est.continuous.begin(), est.continuous.end(), predictor);
  if (c == est.continuous.end())
    throw InvalidInput("margins: predictor '" + predictor + "' is not a continuous predictor of the fit");
  const std::size_t ci = static_cast<std::size_t>(c - est.continuous.begin());
  const int col = est.index_of(predictor);
  std::vector<MarginPoint> out;
  for (double v : grid) {
    std::vector<double> x = profile(est);
    if (col >= 0) x[static_cast<std::size_t>(col)] = v;
    MarginPoint m = predict(est, x);
    m.predictor = predictor;
    m.value = csv::num(v, 6);
    if (ci < est.mins.size()) m.extrapolated = v < est.mins[ci] || v > est.maxs[ci];
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<MarginPoint> margins_by_level(const LogitEstimate& est, const std::string& factor) {
  auto f = std::find_if(est.factors.begin(), est.factors.end(),
                        [&](const LogitFactor& lf) { return lf.name == factor; });
  if (f == est.factors.end()) throw InvalidInput("margins: unknown factor '" + factor + "'");
  std::vector<MarginPoint> out;
  for (const auto& level : f->levels) {
    std::vector<double> x = profile(est);
    for (const auto& other : f->levels) {
      const int col = est.index_of(factor + "=" + other);
      if (col >= 0) x[static_cast<std::size_t>(col)] = other == level ? 1.0 : 0.0;
    }
    MarginPoint m = predict(est, x);
    m.predictor = factor;
    m.value = level;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> g;
  if (points <= 0) return g;
  if (points == 1) return {lo};
  for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * i / (points - 1));
  return g;
}

void write_logit_csv(const std::string& path, const LogitEstimate& est) {
  csv::Table t{{"term", "coef", "se", "p", "stars", "n_obs", "loglik", "pseudo_r2"}, {}};
  for (std::size_t j = 0; j < est.names.size(); ++j)
    t.rows.push_back({est.names[j], csv::num(est.coef[j]), csv::num(est.se[j]), csv::num(est.p[j]),
                      significance_stars(est.p[j]), std::to_string(est.n_obs),
                      csv::num(est.loglik), csv::num(est.pseudo_r2)});
  csv::write_file(path, t);
}

void write_margins_csv(const std::string& path, const std::vector<MarginPoint>& points) {
  csv::Table t{{"predictor", "value", "probability", "ci_lo", "ci_hi", "flags"}, {}};
  for (const auto& m : points)
    t.rows.push_back({m.predictor, m.value, csv::num(m.probability), csv::num(m.ci_lo),
                      csv::num(m.ci_hi), m.extrapolated ? "extrapolation" : ""});
  csv::write_file(path, t);
}

}  // namespace hatmatch

#include "hatmatch/scm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "hatmatch/error.hpp"

namespace hatmatch {

std::vector<double> project_to_simplex(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cumsum += u[i];
    const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::max(v[i] - theta, 0.0);
  return w;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Quadratic {
  MatrixXd gram;  // X'X
  VectorXd lin;   // X'x
  double constant = 0.0;

  double value(const VectorXd& w) const {
    return std::max(0.0, w.dot(gram * w) - 2.0 * lin.dot(w) + constant);
  }
  VectorXd gradient(const VectorXd& w) const { return 2.0 * (gram * w - lin); }
};

// Minimiser of the quadratic on the affine set {sum_{j in S} w_j = 1}.
VectorXd solve_on_support(const Quadratic& q, const std::vector<int>& support) {
  const int s = static_cast<int>(support.size());
  MatrixXd kkt = MatrixXd::Zero(s + 1, s + 1);
  VectorXd rhs(s + 1);
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < s; ++b) kkt(a, b) = 2.0 * q.gram(support[a], support[b]);
    kkt(a, s) = 1.0;
    kkt(s, a) = 1.0;
    rhs(a) = 2.0 * q.lin(support[a]);
  }
  rhs(s) = 1.0;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(kkt);
  VectorXd sol = cod.solve(rhs);
  return sol.head(s);
}

// Primal active-set method started from a feasible point.
bool active_set(const Quadratic& q, VectorXd& w, int max_steps) {
  const int n = static_cast<int>(w.size());
  std::vector<char> in(n, 0);
  for (int j = 0; j < n; ++j) in[j] = w(j) > 0.0;
  for (int step = 0; step < max_steps; ++step) {
    std::vector<int> support;
    for (int j = 0; j < n; ++j)
      if (in[j]) support.push_back(j);
    const VectorXd v = solve_on_support(q, support);
    bool feasible = true;
    for (double x : v)
      if (x < 0.0) feasible = false;
    if (feasible) {
      VectorXd cand = VectorXd::Zero(n);
      for (std::size_t a = 0; a < support.size(); ++a) cand(support[a]) = v(a);
      w = cand;
      const VectorXd g = q.gradient(w);
      double mu = 0.0;
      for (int j : support) mu += g(j);
      mu /= static_cast<double>(support.size());
      const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
      int enter = -1;
      double worst = -1e-10 * scale;
      for (int j = 0; j < n; ++j) {
        if (in[j]) continue;
        if (g(j) - mu < worst) {
          worst = g(j) - mu;
          enter = j;
        }
      }
      if (enter < 0) return true;
      in[enter] = 1;
      continue;
    }
    // Step toward v until the first support weight hits zero.
    double alpha = 1.0;
    for (std::size_t a = 0; a < support.size(); ++a) {
      const int j = support[a];
      if (v(a) < 0.0) alpha = std::min(alpha, w(j) / (w(j) - v(a)));
    }
    for (std::size_t a = 0; a < support.size(); ++a) {
      const int j = support[a];
      w(j) += alpha * (v(a) - w(j));
      if (w(j) <= 1e-15) {
        w(j) = 0.0;
        in[j] = 0;
      }
    }
    const double total = w.sum();
    if (total > 0.0) w /= total;
    if (std::none_of(in.begin(), in.end(), [](char c) { return c; })) return false;
  }
  return false;
}

}  // namespace

SimplexLsResult simplex_least_squares(std::span<const double> target,
                                      const std::vector<std::vector<double>>& columns,
                                      const ScmOptions& options) {
  const int k = static_cast<int>(columns.size());
  const int m = static_cast<int>(target.size());
  if (k == 0) throw InvalidInput("synthetic control needs at least one donor");
  MatrixXd X(m, k);
  for (int j = 0; j < k; ++j) {
    if (static_cast<int>(columns[j].size()) != m)
      throw InvalidInput("donor predictor length differs from treated predictor length");
    for (int i = 0; i < m; ++i) X(i, j) = columns[j][i];
  }
  const VectorXd x = Eigen::Map<const VectorXd>(target.data(), m);
  Quadratic q{X.transpose() * X, X.transpose() * x, x.squaredNorm()};

  SimplexLsResult res;
  VectorXd w = VectorXd::Constant(k, 1.0 / k);
  if (k == 1) {
    res.weights = {1.0};
    res.objective = q.value(w);
    res.converged = true;
    return res;
  }

  const double lipschitz =
      2.0 * std::max(Eigen::SelfAdjointEigenSolver<MatrixXd>(q.gram, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff(),
                     1e-300);
  const double step = 1.0 / lipschitz;

  VectorXd y = w, w_prev = w;
  double f = q.value(w);
  double momentum = 1.0;
  bool converged = false;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const VectorXd g = q.gradient(y);
    VectorXd trial = y - step * g;
    auto projected = project_to_simplex({trial.data(), static_cast<std::size_t>(k)});
    VectorXd w_next = Eigen::Map<VectorXd>(projected.data(), k);
    const double f_next = q.value(w_next);
    if (f_next > f) {
      // Adaptive restart: drop momentum and take a plain projected step.
      momentum = 1.0;
      y = w;
      const VectorXd g0 = q.gradient(w);
      trial = w - step * g0;
      projected = project_to_simplex({trial.data(), static_cast<std::size_t>(k)});
      w_next = Eigen::Map<VectorXd>(projected.data(), k);
      const double f_plain = q.value(w_next);
      if (f - f_plain < options.tolerance) {
        converged = true;
        ++it;
        break;
      }
      w_prev = w;
      w = w_next;
      f = f_plain;
      y = w;
      continue;
    }
    const double improvement = f - f_next;
    const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = w_next + ((momentum - 1.0) / momentum_next) * (w_next - w);
    momentum = momentum_next;
    w_prev = w;
    w = w_next;
    f = f_next;
    if (improvement < options.tolerance) {
      converged = true;
      ++it;
      break;
    }
  }

  if (options.active_set_polish) {
    VectorXd polished = w;
    const bool kkt = active_set(q, polished, 4 * k + 50);
    const double f_pol = q.value(polished);
    bool on_simplex = std::abs(polished.sum() - 1.0) < 1e-12;
    for (int j = 0; j < k; ++j)
      if (polished(j) < 0.0) on_simplex = false;
    if (on_simplex && f_pol <= f + 1e-12 * std::max(1.0, f)) {
      w = polished;
      f = f_pol;
      converged = converged || kkt;
    }
  }

  // Clean exact-zero weights and renormalise to the simplex.
  for (int j = 0; j < k; ++j)
    if (w(j) < 0.0) w(j) = 0.0;
  w /= w.sum();
  res.weights.assign(w.data(), w.data() + k);
  res.objective = q.value(w);
  res.iterations = it;
  res.converged = converged;
  return res;
}

double pre_rmspe(std::span<const double> treated_outcomes,
                 const std::vector<std::vector<double>>& donor_outcomes,
                 std::span<const double> weights) {
  if (treated_outcomes.empty()) return 0.0;
  double ss = 0.0;
  for (std::size_t t = 0; t < treated_outcomes.size(); ++t) {
    double cf = 0.0;
    for (std::size_t j = 0; j < donor_outcomes.size(); ++j) cf += weights[j] * donor_outcomes[j][t];
    const double gap = treated_outcomes[t] - cf;
    ss += gap * gap;
  }
  return std::sqrt(ss / static_cast<double>(treated_outcomes.size()));
}

SCMWeights scm_fit(const ScmProblem& problem, const ScmOptions& options) {
  if (problem.donor_predictors.empty()) throw InvalidInput("synthetic control needs at least one donor");
  if (problem.donor_outcomes.size() != problem.donor_predictors.size())
    throw InvalidInput("donor outcome and predictor counts differ");
  for (const auto& d : problem.donor_outcomes)
    if (d.size() != problem.treated_outcomes.size())
      throw InvalidInput("donor outcome length differs from treated outcome length");
  auto solved = simplex_least_squares(problem.treated_predictors, problem.donor_predictors, options);
  SCMWeights out;
  out.weights = std::move(solved.weights);
  out.objective = solved.objective;
  out.iterations = solved.iterations;
  out.converged = solved.converged;
  out.pre_rmspe = pre_rmspe(problem.treated_outcomes, problem.donor_outcomes, out.weights);
  return out;
}

SCMWeights scm_fit(std::span<const double> treated_series,
                   const std::vector<std::vector<double>>& donor_series,
                   const ScmOptions& options) {
  ScmProblem p{{treated_series.begin(), treated_series.end()}, donor_series,
               {treated_series.begin(), treated_series.end()}, donor_series};
  return scm_fit(p, options);
}

std::vector<double> scm_predictors(const PreSeries& series, OutcomeKind kind) {
  const auto& own = kind == OutcomeKind::Publications ? series.pubs : series.cites;
  const auto& other = kind == OutcomeKind::Publications ? series.cites : series.pubs;
  std::vector<double> x(own.begin(), own.end());
  x.push_back(std::accumulate(other.begin(), other.end(), 0.0) /
              static_cast<double>(std::max<std::size_t>(other.size(), 1)));
  return x;
}

}  // namespace hatmatch

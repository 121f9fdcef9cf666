#pragma once

// Reference implementations used only by tests. They share no numerics with
// the library: plain loops, Gaussian elimination, exhaustive enumeration.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Solves A x = b by Gaussian elimination with partial pivoting (long double).
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  std::vector<std::vector<long double>> m(n, std::vector<long double>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = a[i][j];
    m[i][n] = b[i];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (std::fabs(m[piv][col]) < 1e-300L) throw std::runtime_error("singular system");
    std::swap(m[col], m[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double f = m[r][col] / m[col][col];
      if (f == 0) continue;
      for (std::size_t c = col; c <= n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(m[i][n] / m[i][i]);
  return x;
}

inline Matrix invert(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix inv(n, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto col = solve(a, e);
    for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
  }
  return inv;
}

// Plain Newton-Raphson logistic regression from zero, no step control.
struct NewtonLogit {
  std::vector<double> coef;
  std::vector<double> se;
  double loglik = 0.0;
  int iterations = 0;
};

inline NewtonLogit newton_logit(const Matrix& x, const std::vector<int>& y, int max_iter = 200) {
  const std::size_t n = x.size(), k = x.front().size();
  NewtonLogit out;
  out.coef.assign(k, 0.0);
  Matrix info;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> grad(k, 0.0);
    info.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0.0;
      for (std::size_t j = 0; j < k; ++j) eta += x[i][j] * out.coef[j];
      const double p = 1.0 / (1.0 + std::exp(-eta));
      for (std::size_t j = 0; j < k; ++j) {
        grad[j] += (y[i] - p) * x[i][j];
        for (std::size_t l = 0; l < k; ++l) info[j][l] += p * (1 - p) * x[i][j] * x[i][l];
      }
    }
    const auto step = solve(info, grad);
    double size = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      out.coef[j] += step[j];
      size = std::max(size, std::fabs(step[j]));
    }
    out.iterations = it + 1;
    if (size < 1e-13) break;
  }
  const Matrix cov = invert(info);
  for (std::size_t j = 0; j < k; ++j) out.se.push_back(std::sqrt(cov[j][j]));
  for (std::size_t i = 0; i < n; ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < k; ++j) eta += x[i][j] * out.coef[j];
    out.loglik += y[i] ? -std::log1p(std::exp(-eta)) : -std::log1p(std::exp(eta));
  }
  return out;
}

// Minimum total cost over every injective row -> column map (rows <= cols).
// Entries equal to +inf are forbidden edges. Returns +inf when no full
// matching exists.
inline double brute_force_assignment(const Matrix& cost) {
  const std::size_t rows = cost.size(), cols = rows ? cost.front().size() : 0;
  std::vector<int> perm(cols);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < rows && std::isfinite(total); ++r) total += cost[r][perm[r]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Weighted least squares with explicit unit and period dummies, solved via
// normal equations in long double. Returns the coefficient on column 0 of
// `regressors` first, then the rest.
inline std::vector<double> dummy_wls(const std::vector<double>& y, const std::vector<double>& w,
                                     const Matrix& regressors, const std::vector<int>& unit,
                                     const std::vector<int>& period) {
  const int n_units = *std::max_element(unit.begin(), unit.end()) + 1;
  const int n_periods = *std::max_element(period.begin(), period.end()) + 1;
  const std::size_t k = regressors.size();
  const std::size_t p = k + n_units + n_periods - 1;
  Matrix xtx(p, std::vector<double>(p, 0.0));
  std::vector<double> xty(p, 0.0);
  std::vector<double> row(p);
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) row[j] = regressors[j][i];
    row[k + unit[i]] = 1.0;
    if (period[i] > 0) row[k + n_units + period[i] - 1] = 1.0;
    for (std::size_t a = 0; a < p; ++a) {
      if (row[a] == 0.0) continue;
      xty[a] += w[i] * row[a] * y[i];
      for (std::size_t b = 0; b < p; ++b) xtx[a][b] += w[i] * row[a] * row[b];
    }
  }
  auto beta = solve(xtx, xty);
  beta.resize(k);
  return beta;
}

// Citation tally straight from the definition: for every citing paper in
// year t and every cited paper of author a, one citation to a in t.
struct TallyPaper {
  std::string id;
  int year = 0;
  std::vector<std::string> authors;
  std::vector<std::string> references;
};

inline std::map<std::string, std::map<int, long>> tally_citations(const std::vector<TallyPaper>& papers) {
  std::map<std::string, std::map<int, long>> out;
  for (const auto& citing : papers)
    for (const auto& ref : std::set<std::string>(citing.references.begin(), citing.references.end()))
      for (const auto& cited : papers)
        if (cited.id == ref)
          for (const auto& a : std::set<std::string>(cited.authors.begin(), cited.authors.end()))
            ++out[a][citing.year];
  return out;
}

inline double set_change_rate(const std::set<std::string>& before, const std::set<std::string>& after) {
  std::size_t fresh = 0;
  for (const auto& e : after) fresh += before.count(e) == 0;
  return static_cast<double>(fresh) / static_cast<double>(after.size());
}

}  // namespace oracle

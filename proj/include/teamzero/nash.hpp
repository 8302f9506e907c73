// Copyright 2026 The teamzero Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Two-player zero-sum matrix game solver (dense simplex on the standard LP
// reduction). The row player maximizes x^T A y.

#ifndef TEAMZERO_NASH_HPP_
#define TEAMZERO_NASH_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace teamzero {

using DenseMatrix = std::vector<std::vector<double>>;

struct NashSolution {
  std::vector<double> row;
  std::vector<double> col;
  double value = 0.0;
};

// max_i (A y)_i - min_j (x^T A)_j: zero exactly at an equilibrium.
inline double Exploitability(const DenseMatrix& a, const std::vector<double>& x,
                             const std::vector<double>& y) {
  const std::size_t m = a.size(), n = a[0].size();
  double best_row = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a[i][j] * y[j];
    best_row = std::max(best_row, s);
  }
  double best_col = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += x[i] * a[i][j];
    best_col = std::min(best_col, s);
  }
  return best_row - best_col;
}

// Column player's LP after shifting A to be strictly positive:
//   max 1^T y  s.t.  (A + c) y <= 1,  y >= 0.
// Its optimum is 1 / (value + c); the row mixture is read off the duals of
// the final tableau. Bland's rule rules out cycling on degenerate games.
inline NashSolution SolveNash(const DenseMatrix& a) {
  if (a.empty() || a[0].empty()) throw std::invalid_argument("empty matrix");
  const std::size_t m = a.size(), n = a[0].size();
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& row : a) {
    if (row.size() != n) throw std::invalid_argument("ragged matrix");
    for (double x : row) {
      if (!std::isfinite(x)) throw std::invalid_argument("non-finite payoff");
      lo = std::min(lo, x);
    }
  }
  const double shift = 1.0 - lo;

  // Tableau: m constraint rows + objective row; n structural + m slack
  // columns + rhs.
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j] + shift;
    t[i][n + i] = 1.0;
    t[i][cols - 1] = 1.0;
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -1.0;

  constexpr double kEps = 1e-12;
  for (int iter = 0; iter < 10000; ++iter) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      if (t[m][j] < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > kEps) {
        const double ratio = t[i][cols - 1] / t[i][enter];
        if (ratio < best_ratio - kEps ||
            (ratio <= best_ratio + kEps && leave < m &&
             basis[i] < basis[leave])) {
          best_ratio = std::min(best_ratio, ratio);
          leave = i;
        }
      }
    }
    if (leave == m) throw std::runtime_error("unbounded Nash LP");
    const double pivot = t[leave][enter];
    for (double& x : t[leave]) x /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  NashSolution sol;
  sol.col.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.col[basis[i]] = std::max(0.0, t[i][cols - 1]);
  }
  sol.row.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) sol.row[i] = std::max(0.0, t[m][n + i]);
  double sy = 0.0, sx = 0.0;
  for (double y : sol.col) sy += y;
  for (double x : sol.row) sx += x;
  for (double& y : sol.col) y /= sy;
  for (double& x : sol.row) x /= sx;
  double v = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) v += sol.row[i] * a[i][j] * sol.col[j];
  }
  sol.value = v;
  return sol;
}

}  // namespace teamzero

#endif  // TEAMZERO_NASH_HPP_

// Independent reference implementations ("oracles") shared by the unit and
// acceptance suites. Everything here is deliberately brute-force and kept
// separate from the library's own algorithms.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "spmi/cooccur.hpp"
#include "spmi/corpus.hpp"
#include "spmi/factorize.hpp"
#include "spmi/types.hpp"

namespace oracle {

// Nodes/weights of n-point Gauss-Legendre quadrature on [-1, 1], found by
// Newton iteration on the Legendre recurrence (classic Numerical Recipes
// construction; independent of any table used by the library).
struct GaussRule {
  std::vector<double> x, w;
};

inline GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.w[n - 1 - i] = rule.w[i];
  }
  return rule;
}

// Pr(Z1 <= x, Z2 <= y) for a standard bivariate normal with correlation rho,
// by composite tensor-product Gauss-Legendre integration of the density over
// [-8.5, x] x [-8.5, y]. Panel width <= 0.5 with 20-point rules makes the
// truncation + quadrature error far below 1e-9.
inline double bvn_cdf_2d_integral(double x, double y, double rho) {
  const double lo = -8.5;
  if (x <= lo || y <= lo) return 0.0;
  x = std::min(x, 8.5);
  y = std::min(y, 8.5);
  static const GaussRule rule = gauss_legendre(20);
  const double det = 1.0 - rho * rho;
  const double norm = 1.0 / (2.0 * M_PI * std::sqrt(det));

  auto panels = [&](double hi) {
    return static_cast<int>(std::ceil((hi - lo) / 0.5));
  };
  const int nx = panels(x), ny = panels(y);
  const double hx = (x - lo) / nx, hy = (y - lo) / ny;

  // Pre-map the quadrature nodes of every panel on each axis.
  std::vector<double> xs, xw, ys, yw;
  for (int p = 0; p < nx; ++p) {
    const double a = lo + p * hx;
    for (int q = 0; q < 20; ++q) {
      xs.push_back(a + 0.5 * hx * (rule.x[q] + 1.0));
      xw.push_back(0.5 * hx * rule.w[q]);
    }
  }
  for (int p = 0; p < ny; ++p) {
    const double a = lo + p * hy;
    for (int q = 0; q < 20; ++q) {
      ys.push_back(a + 0.5 * hy * (rule.x[q] + 1.0));
      yw.push_back(0.5 * hy * rule.w[q]);
    }
  }

  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double xi = xs[i];
    double row = 0.0;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double yj = ys[j];
      const double e =
          (xi * xi - 2.0 * rho * xi * yj + yj * yj) / (2.0 * det);
      row += yw[j] * std::exp(-e);
    }
    total += xw[i] * row;
  }
  return norm * total;
}

// Naive double-loop co-occurrence counter.
inline spmi::Matrix brute_force_cooccurrences(const spmi::Corpus& corpus,
                                              int window, spmi::Index V) {
  spmi::Matrix counts = spmi::Matrix::Zero(V, V);
  const auto n = static_cast<std::int64_t>(corpus.ids.size());
  for (std::int64_t t = 0; t < n; ++t) {
    for (std::int64_t u = 0; u < n; ++u) {
      if (u == t) continue;
      if (std::llabs(u - t) <= window) {
        counts(corpus.ids[t], corpus.ids[u]) += 1.0;
      }
    }
  }
  return counts;
}

// Argmin over the grid lambda in [-10, 10] with step 1e-4 of the blend
// objective sum_observed (target - (lambda*w_hat + (1-lambda)*w_prev))^2 / c,
// with every grid point evaluated directly from the matrices.
inline double lambda_grid_search(const spmi::Matrix& target,
                                 const spmi::MaskMatrix& missing,
                                 const spmi::Matrix& w_hat,
                                 const spmi::Matrix& w_prev,
                                 const spmi::Matrix* weights) {
  double best_lambda = -10.0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (long step = 0; step <= 200000; ++step) {
    const double lambda = -10.0 + 1e-4 * static_cast<double>(step);
    double obj = 0.0;
    for (spmi::Index j = 0; j < target.cols(); ++j) {
      for (spmi::Index i = 0; i < target.rows(); ++i) {
        if (missing(i, j)) continue;
        const double blend =
            lambda * w_hat(i, j) + (1.0 - lambda) * w_prev(i, j);
        const double r = target(i, j) - blend;
        obj += weights ? r * r / (*weights)(i, j) : r * r;
      }
    }
    if (obj < best_obj) {
      best_obj = obj;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

// RMS difference between two matrices over the cells where counts >= floor.
inline double rms_on_frequent_cells(const spmi::Matrix& a,
                                    const spmi::Matrix& b,
                                    const spmi::Matrix& counts,
                                    double floor_count) {
  double sum = 0.0;
  long n = 0;
  for (spmi::Index j = 0; j < a.cols(); ++j) {
    for (spmi::Index i = 0; i < a.rows(); ++i) {
      if (counts(i, j) >= floor_count) {
        const double r = a(i, j) - b(i, j);
        sum += r * r;
        ++n;
      }
    }
  }
  return n == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(n));
}

}  // namespace oracle

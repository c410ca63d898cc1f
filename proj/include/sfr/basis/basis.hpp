#pragma once

// One-dimensional nodal machinery on [0,1]: Legendre (Gauss) points, weights,
// Lagrange bases, derivative matrix and the DG-recovering correction function.

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "sfr/core/types.hpp"

namespace sfr {

namespace detail {

// Legendre polynomial L_n(x) and its derivative on [-1,1] by the three-term recurrence.
inline void legendre(int n, double x, double& p, double& dp) {
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  // derivative via n (x L_n - L_{n-1}) / (x^2 - 1); fall back at the endpoints
  if (std::abs(std::abs(x) - 1.0) < 1e-14) {
    dp = 0.5 * n * (n + 1.0) * (x > 0 ? 1.0 : (n % 2 == 0 ? -1.0 : 1.0));
  } else {
    dp = n * (x * p1 - p0) / (x * x - 1.0);
  }
}

}  // namespace detail

struct LegendreRule {
  std::vector<double> points;   // on [0,1], increasing
  std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre points and weights on [0,1]; Newton iteration from Chebyshev
// guesses, symmetric by construction.
inline LegendreRule legendre_rule(int n) {
  if (n < 1) throw ConfigError("legendre_points: order must be >= 1, got " + std::to_string(n));
  std::vector<double> x(n), w(n);
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    // i-th root from the left on [-1,1]
    double r = -std::cos(pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      detail::legendre(n, r, p, dp);
      const double dx = p / dp;
      r -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    detail::legendre(n, r, p, dp);
    x[i] = r;
    x[n - 1 - i] = -r;
    const double wi = 2.0 / ((1.0 - r * r) * dp * dp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) {
    double p = 0.0, dp = 1.0;
    detail::legendre(n, 0.0, p, dp);
    x[half] = 0.0;
    w[half] = 2.0 / (dp * dp);
  }
  LegendreRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = 0.5 * (1.0 + x[i]);
    rule.weights[i] = 0.5 * w[i];
  }
  return rule;
}

inline std::vector<double> legendre_points(int n) { return legendre_rule(n).points; }

enum class Side { left, right };

// Immutable per-order data. N = P + 1 points per direction.
struct BasisSet {
  int n = 0;
  std::vector<double> x;     // solution/flux point abscissae
  std::vector<double> w;     // quadrature weights
  std::vector<double> bary;  // barycentric weights 1 / prod_{s!=i}(X_i - X_s)
  std::vector<double> d;     // d[j*n + i] = h_i'(X_j)
  std::vector<double> h0;    // h_i(0)
  std::vector<double> h1;    // h_i(1)
  std::vector<double> gl;    // g_L'(X_j)
  std::vector<double> gr;    // g_R'(X_j)

  double deriv(int j, int i) const { return d[static_cast<size_t>(j) * n + i]; }
};

// h_i(xi) = prod_{s != i} (xi - X_s) / (X_i - X_s); any real xi accepted.
inline double lagrange_eval(const std::vector<double>& nodes, int i, double xi) {
  double v = 1.0;
  const int n = static_cast<int>(nodes.size());
  for (int s = 0; s < n; ++s) {
    if (s == i) continue;
    v *= (xi - nodes[s]) / (nodes[i] - nodes[s]);
  }
  return v;
}

inline double lagrange_eval(const BasisSet& b, int i, double xi) { return lagrange_eval(b.x, i, xi); }

// All bases at one coordinate.
inline void lagrange_row(const BasisSet& b, double xi, double* out) {
  for (int i = 0; i < b.n; ++i) out[i] = lagrange_eval(b.x, i, xi);
}

// Left DG correction function on [0,1]: g_L(xi) = R_N(2 xi - 1) with the
// right Radau polynomial R_N = (-1)^N (L_N - L_{N-1}) / 2.
inline double correction_value(int n, Side side, double xi) {
  const double s = (side == Side::left) ? xi : 1.0 - xi;
  const double r = 2.0 * s - 1.0;
  double pn, dpn, pm, dpm;
  detail::legendre(n, r, pn, dpn);
  detail::legendre(n - 1, r, pm, dpm);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * 0.5 * (pn - pm);
}

inline double correction_slope(int n, Side side, double xi) {
  const double s = (side == Side::left) ? xi : 1.0 - xi;
  const double r = 2.0 * s - 1.0;
  double pn, dpn, pm, dpm;
  detail::legendre(n, r, pn, dpn);
  detail::legendre(n - 1, r, pm, dpm);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  const double gl = sign * (dpn - dpm);  // d/dxi = 2 * d/dr
  return side == Side::left ? gl : -gl;
}

inline std::vector<double> correction_derivative(const BasisSet& b, Side side) {
  return side == Side::left ? b.gl : b.gr;
}

inline BasisSet make_basis(int n) {
  LegendreRule rule = legendre_rule(n);
  BasisSet b;
  b.n = n;
  b.x = rule.points;
  b.w = rule.weights;
  b.bary.assign(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < n; ++s)
      if (s != i) b.bary[i] /= (b.x[i] - b.x[s]);
  b.d.assign(static_cast<size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const double v = (b.bary[i] / b.bary[j]) / (b.x[j] - b.x[i]);
      b.d[static_cast<size_t>(j) * n + i] = v;
      diag -= v;
    }
    b.d[static_cast<size_t>(j) * n + j] = diag;  // rows sum to zero exactly
  }
  b.h0.resize(n);
  b.h1.resize(n);
  lagrange_row(b, 0.0, b.h0.data());
  lagrange_row(b, 1.0, b.h1.data());
  b.gl.resize(n);
  b.gr.resize(n);
  for (int j = 0; j < n; ++j) {
    b.gl[j] = correction_slope(n, Side::left, b.x[j]);
    b.gr[j] = correction_slope(n, Side::right, b.x[j]);
  }
  return b;
}

// Cached, thread-safe access; bases are immutable once built.
inline const BasisSet& basis_for(int n) {
  static std::mutex mtx;
  static std::map<int, std::unique_ptr<BasisSet>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<BasisSet>(make_basis(n))).first;
  return *it->second;
}

inline double quadrature_integrate(const BasisSet& b, std::span<const double> samples) {
  if (static_cast<int>(samples.size()) != b.n)
    throw std::invalid_argument("quadrature_integrate: expected " + std::to_string(b.n) + " samples");
  double s = 0.0;
  for (int i = 0; i < b.n; ++i) s += b.w[i] * samples[i];
  return s;
}

}  // namespace sfr

#pragma once

// Explicit SSP Runge-Kutta schemes. Each scheme is written in its published
// Shu-Osher / low-storage form and converted once to a Butcher tableau, so a
// step is Y_i = U + dt sum_j a_ij F_j, U_new = U + dt sum_j b_j F_j.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sfr/core/types.hpp"

namespace sfr {

struct ButcherTableau {
  std::string name;
  int stages = 0, order = 0;
  std::vector<std::vector<double>> a;  // strictly lower triangular
  std::vector<double> b, c;
};

namespace detail {

// A stage value as a linear combination: coef[0] * U + dt * sum_j coef[j+1] F_j.
struct Lin {
  std::vector<double> coef;
  explicit Lin(int s) : coef(static_cast<size_t>(s) + 1, 0.0) {}
  static Lin unit(int s) {
    Lin l(s);
    l.coef[0] = 1.0;
    return l;
  }
  Lin operator+(const Lin& o) const {
    Lin r = *this;
    for (size_t i = 0; i < coef.size(); ++i) r.coef[i] += o.coef[i];
    return r;
  }
  Lin operator*(double k) const {
    Lin r = *this;
    for (double& v : r.coef) v *= k;
    return r;
  }
};

// Records stage evaluations while a Shu-Osher program runs.
class TableauBuilder {
 public:
  explicit TableauBuilder(int s) : s_(s) {}
  Lin u0() const { return Lin::unit(s_); }
  // Evaluate F at the given stage value: returns dt F_i as a Lin.
  Lin f(const Lin& y) {
    if (static_cast<int>(stages_.size()) >= s_) throw ConfigError("tableau builder: too many stages");
    stages_.push_back(y);
    Lin r(s_);
    r.coef[stages_.size()] = 1.0;
    return r;
  }
  ButcherTableau finish(const std::string& name, int order, const Lin& result) const {
    if (static_cast<int>(stages_.size()) != s_) throw ConfigError("tableau builder: stage count mismatch for " + name);
    ButcherTableau t;
    t.name = name;
    t.stages = s_;
    t.order = order;
    t.a.assign(s_, std::vector<double>(s_, 0.0));
    t.c.assign(s_, 0.0);
    for (int i = 0; i < s_; ++i) {
      for (int j = 0; j < s_; ++j) t.a[i][j] = stages_[i].coef[j + 1];
      for (int j = 0; j < s_; ++j) t.c[i] += t.a[i][j];
    }
    t.b.assign(result.coef.begin() + 1, result.coef.end());
    return t;
  }

 private:
  int s_;
  std::vector<Lin> stages_;
};

}  // namespace detail

// s-stage second order (Spiteri-Ruuth family).
inline ButcherTableau ssp_s2(int s) {
  detail::TableauBuilder tb(s);
  const double h = 1.0 / (s - 1);
  detail::Lin u = tb.u0();
  for (int i = 0; i < s - 1; ++i) u = u + tb.f(u) * h;
  u = tb.u0() * (1.0 / s) + (u + tb.f(u) * h) * ((s - 1.0) / s);
  return tb.finish("ssp(" + std::to_string(s) + ",2)", 2, u);
}

// Eight stages, third order, SSP coefficient r = 5.10714756443533 (an
// optimal member, derived numerically; all Shu-Osher coefficients >= 0).
inline ButcherTableau ssp_83() {
  detail::TableauBuilder tb(8);
  const double h = 1.0 / 5.1071475644353328517;
  const double a43 = 0.60084554840182819094, a54 = 0.945, a65 = 0.83353675949648096189;
  const double a71 = 0.017488425170023067886, a82 = 0.2;
  const detail::Lin u0 = tb.u0();
  const detail::Lin u1 = u0 + tb.f(u0) * h;
  const detail::Lin u2 = u1 + tb.f(u1) * h;
  const detail::Lin u3 = u2 + tb.f(u2) * h;
  const detail::Lin u4 = u0 * (1.0 - a43) + (u3 + tb.f(u3) * h) * a43;
  const detail::Lin u5 = u0 * (1.0 - a54) + (u4 + tb.f(u4) * h) * a54;
  const detail::Lin u6 = u1 * (1.0 - a65) + (u5 + tb.f(u5) * h) * a65;
  const detail::Lin u7 = u2 * a71 + (u6 + tb.f(u6) * h) * (1.0 - a71);
  const detail::Lin u8 = u3 * a82 + (u7 + tb.f(u7) * h) * (1.0 - a82);
  return tb.finish("ssp(8,3)", 3, u8);
}

// Five stages, fourth order.
inline ButcherTableau ssp_54() {
  detail::TableauBuilder tb(5);
  const detail::Lin u0 = tb.u0();
  const detail::Lin u1 = u0 + tb.f(u0) * 0.391752226571890;
  const detail::Lin u2 = u0 * 0.444370493651235 + u1 * 0.555629506348765 + tb.f(u1) * 0.368410593050371;
  const detail::Lin u3 = u0 * 0.620101851488403 + u2 * 0.379898148511597 + tb.f(u2) * 0.251891774271694;
  const detail::Lin f3 = tb.f(u3);
  const detail::Lin u4 = u0 * 0.178079954393132 + u3 * 0.821920045606868 + f3 * 0.544974750228521;
  const detail::Lin u5 = u2 * 0.517231671970585 + u3 * 0.096059710526147 + f3 * 0.063692468666290 +
                         u4 * 0.386708617503269 + tb.f(u4) * 0.226007483236906;
  return tb.finish("ssp(5,4)", 4, u5);
}

// Ten stages, fourth order, low-storage form.
inline ButcherTableau ssp_104() {
  detail::TableauBuilder tb(10);
  detail::Lin q1 = tb.u0(), q2 = tb.u0();
  for (int i = 0; i < 5; ++i) q1 = q1 + tb.f(q1) * (1.0 / 6.0);
  q2 = q2 * (1.0 / 25.0) + q1 * (9.0 / 25.0);
  q1 = q2 * 15.0 + q1 * -5.0;
  for (int i = 0; i < 4; ++i) q1 = q1 + tb.f(q1) * (1.0 / 6.0);
  q1 = q2 + q1 * (3.0 / 5.0) + tb.f(q1) * (1.0 / 10.0);
  return tb.finish("ssp(10,4)", 4, q1);
}

// Largest violation of the order conditions up to the tableau's order.
inline double order_condition_defect(const ButcherTableau& t) {
  const int s = t.stages;
  auto av = [&](const std::vector<double>& v) {
    std::vector<double> r(s, 0.0);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) r[i] += t.a[i][j] * v[j];
    return r;
  };
  auto bdot = [&](const std::vector<double>& v) {
    double r = 0.0;
    for (int i = 0; i < s; ++i) r += t.b[i] * v[i];
    return r;
  };
  auto mul = [&](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> r(s);
    for (int i = 0; i < s; ++i) r[i] = x[i] * y[i];
    return r;
  };
  const std::vector<double> one(s, 1.0), c = t.c, c2 = mul(c, c);
  double worst = 0.0;
  auto check = [&](double v, double ref) { worst = std::max(worst, std::abs(v - ref)); };
  // row sums are consistent with c by construction; check them anyway
  const std::vector<double> a1 = av(one);
  for (int i = 0; i < s; ++i) check(a1[i], c[i]);
  check(bdot(one), 1.0);
  if (t.order >= 2) check(bdot(c), 0.5);
  if (t.order >= 3) {
    check(bdot(c2), 1.0 / 3.0);
    check(bdot(av(c)), 1.0 / 6.0);
  }
  if (t.order >= 4) {
    check(bdot(mul(c2, c)), 0.25);
    check(bdot(mul(c, av(c))), 0.125);
    check(bdot(av(c2)), 1.0 / 12.0);
    check(bdot(av(av(c))), 1.0 / 24.0);
  }
  return worst;
}

// Accepts "ssp(s,p)" with optional spaces; case-insensitive.
inline ButcherTableau make_scheme(const std::string& name) {
  std::string k;
  for (char ch : name)
    if (ch != ' ') k.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  ButcherTableau t;
  if (k == "ssp(4,2)")
    t = ssp_s2(4);
  else if (k == "ssp(8,3)")
    t = ssp_83();
  else if (k == "ssp(5,4)")
    t = ssp_54();
  else if (k == "ssp(10,4)")
    t = ssp_104();
  else
    throw ConfigError("unknown time scheme '" + name + "' (expected ssp(4,2), ssp(8,3), ssp(5,4) or ssp(10,4))");
  if (order_condition_defect(t) > 1e-13) throw ConfigError("time scheme " + t.name + " fails its order conditions");
  return t;
}

// Residual evaluator: f = R(t, y). Stage-time aware.
using Residual = std::function<void(double t, const std::vector<double>& y, std::vector<double>& f)>;

class RungeKutta {
 public:
  explicit RungeKutta(ButcherTableau t) : t_(std::move(t)) {}
  const ButcherTableau& tableau() const { return t_; }

  // One step from t to t + dt. step is used only for error messages.
  void advance(std::vector<double>& u, double t, double dt, const Residual& r, long step = 0) {
    const int s = t_.stages;
    const size_t n = u.size();
    k_.resize(s);
    y_.resize(n);
    for (int i = 0; i < s; ++i) {
      y_ = u;
      for (int j = 0; j < i; ++j) {
        const double a = t_.a[i][j];
        if (a == 0.0) continue;
        const double* kj = k_[j].data();
        for (size_t m = 0; m < n; ++m) y_[m] += dt * a * kj[m];
      }
      if (i > 0) require_finite(y_, step, i);
      k_[i].resize(n);
      r(t + t_.c[i] * dt, y_, k_[i]);
    }
    for (int j = 0; j < s; ++j) {
      const double b = t_.b[j];
      if (b == 0.0) continue;
      for (size_t m = 0; m < n; ++m) u[m] += dt * b * k_[j][m];
    }
    require_finite(u, step, s);
  }

 private:
  static void require_finite(const std::vector<double>& y, long step, int stage) {
    for (size_t m = 0; m < y.size(); ++m)
      if (!std::isfinite(y[m]))
        throw NumericalError("divergence: non-finite value at step " + std::to_string(step) + ", stage " +
                             std::to_string(stage) + ", entry " + std::to_string(m));
  }

  ButcherTableau t_;
  std::vector<std::vector<double>> k_;
  std::vector<double> y_;
};

}  // namespace sfr

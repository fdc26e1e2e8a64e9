#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

// Truncated bivariate Taylor polynomials ("jets"). A Jet holds the
// coefficients c[i][j] of dx^i dy^j for i + j <= kJetDegree, so evaluating an
// analytic expression on jets seeded at a point yields all its partial
// derivatives there to rounding error: d^{i+j}f / dx^i dy^j = i! j! c[i][j].
namespace cmc {

inline constexpr int kJetDegree = 5;

class Jet {
 public:
  Jet() { c_.fill({}); }
  Jet(double constant) : Jet() { c_[0][0] = constant; }  // NOLINT(implicit)

  static Jet variable_x(double x0) {
    Jet j(x0);
    j.c_[1][0] = 1.0;
    return j;
  }
  static Jet variable_y(double y0) {
    Jet j(y0);
    j.c_[0][1] = 1.0;
    return j;
  }

  double coeff(int i, int j) const { return c_[i][j]; }
  double& coeff(int i, int j) { return c_[i][j]; }
  double value() const { return c_[0][0]; }

  /// Partial derivative d^{i+j} / dx^i dy^j at the seed point.
  double derivative(int i, int j) const {
    if (i < 0 || j < 0 || i + j > kJetDegree) throw std::out_of_range("jet derivative order");
    return factorial(i) * factorial(j) * c_[i][j];
  }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i <= kJetDegree; ++i)
      for (int j = 0; i + j <= kJetDegree; ++j) c_[i][j] += o.c_[i][j];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i <= kJetDegree; ++i)
      for (int j = 0; i + j <= kJetDegree; ++j) c_[i][j] -= o.c_[i][j];
    return *this;
  }
  Jet& operator*=(double s) {
    for (int i = 0; i <= kJetDegree; ++i)
      for (int j = 0; i + j <= kJetDegree; ++j) c_[i][j] *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int i = 0; i <= kJetDegree; ++i)
      for (int j = 0; i + j <= kJetDegree; ++j)
        for (int k = 0; i + j + k <= kJetDegree; ++k)
          for (int l = 0; i + j + k + l <= kJetDegree; ++l) r.c_[i + k][j + l] += a.c_[i][j] * b.c_[k][l];
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

  /// Applies a scalar function given its Taylor coefficients at the constant
  /// term: f(c + d) = sum_k taylor[k] d^k, where d is the nilpotent part.
  static Jet compose(const Jet& x, const std::array<double, kJetDegree + 1>& taylor) {
    Jet d = x;
    d.c_[0][0] = 0.0;
    Jet r(taylor[0]);
    Jet power(1.0);
    for (int k = 1; k <= kJetDegree; ++k) {
      power = power * d;
      r += taylor[k] * power;
    }
    return r;
  }

  friend Jet sqrt(const Jet& x) {
    const double a = x.value();
    if (!(a > 0.0)) throw std::domain_error("jet sqrt needs a positive constant term");
    // sqrt(a + d) = sqrt(a) sum_k binom(1/2, k) (d / a)^k
    std::array<double, kJetDegree + 1> t{};
    double binom = 1.0;
    const double root = std::sqrt(a);
    for (int k = 0; k <= kJetDegree; ++k) {
      t[k] = root * binom / std::pow(a, k);
      binom *= (0.5 - k) / (k + 1);
    }
    return compose(x, t);
  }

  friend Jet reciprocal(const Jet& x) {
    const double a = x.value();
    if (a == 0.0) throw std::domain_error("jet reciprocal of zero");
    std::array<double, kJetDegree + 1> t{};
    for (int k = 0; k <= kJetDegree; ++k) t[k] = (k % 2 == 0 ? 1.0 : -1.0) / std::pow(a, k + 1);
    return compose(x, t);
  }

 private:
  static double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  }

  std::array<std::array<double, kJetDegree + 1>, kJetDegree + 1> c_;
};

}  // namespace cmc

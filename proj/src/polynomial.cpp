#include "fpdyn/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fpdyn/errors.hpp"

namespace fpdyn {

double eval_cubic(const Cubic& c, double x) { return ((c[0] * x + c[1]) * x + c[2]) * x + c[3]; }

double eval_cubic_derivative(const Cubic& c, double x) { return (3.0 * c[0] * x + 2.0 * c[1]) * x + c[2]; }

double bracketed_newton(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo, double hi,
                        double ftol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw SearchError("root not bracketed");
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fx = f(x);
    if (std::abs(fx) <= ftol) return x;
    if ((fx > 0) == (flo > 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double d = df(x);
    double next = d != 0.0 ? x - fx / d : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
      return next;
    x = next;
  }
  return x;
}

double cubic_root_in(const Cubic& c, double lo, double hi, double ftol) {
  return bracketed_newton([&](double x) { return eval_cubic(c, x); },
                          [&](double x) { return eval_cubic_derivative(c, x); }, lo, hi, ftol);
}

std::array<std::complex<double>, 3> cubic_roots(const Cubic& c) {
  if (c[0] == 0.0) throw ParameterError("leading cubic coefficient is zero");
  const double a = c[1] / c[0], b = c[2] / c[0], d = c[3] / c[0];
  // depressed cubic t^3 + p t + q with x = t - a/3
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
  const double shift = -a / 3.0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  std::array<std::complex<double>, 3> roots;
  const Cubic monic{1.0, a, b, d};
  auto polish = [&](double x) {
    for (int k = 0; k < 3; ++k) {
      const double dv = eval_cubic_derivative(monic, x);
      if (dv == 0.0) break;
      const double nx = x - eval_cubic(monic, x) / dv;
      if (std::abs(eval_cubic(monic, nx)) >= std::abs(eval_cubic(monic, x))) break;
      x = nx;
    }
    return x;
  };
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + sq);
    const double v = std::cbrt(-q / 2.0 - sq);
    const double r = polish(u + v + shift);
    // deflate: x^2 + (a + r) x + (b + r (a + r))
    const double e = a + r;
    const double f = b + r * e;
    const double re = -e / 2.0;
    const double im2 = f - e * e / 4.0;
    const double im = std::sqrt(std::max(0.0, im2));
    roots = {std::complex<double>(r, 0.0), std::complex<double>(re, im), std::complex<double>(re, -im)};
  } else {
    // three real roots (trigonometric form)
    double m = std::sqrt(std::max(0.0, -p / 3.0));
    if (m == 0.0) {
      const double r = polish(shift);
      roots = {std::complex<double>(r), std::complex<double>(r), std::complex<double>(r)};
    } else {
      const double arg = std::clamp(3.0 * q / (2.0 * p * m), -1.0, 1.0);
      const double theta = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k) {
        const double t = 2.0 * m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
        roots[static_cast<std::size_t>(k)] = std::complex<double>(polish(t + shift), 0.0);
      }
    }
  }
  return roots;
}

Cubic characteristic_polynomial(const Matrix& m) {
  if (m.rows() != 3 || m.cols() != 3) throw StructuralError("characteristic polynomial needs a 3x3 matrix");
  const double tr = m(0, 0) + m(1, 1) + m(2, 2);
  const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                        m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  return {1.0, -tr, minors, -determinant(m)};
}

std::array<std::complex<double>, 3> eigenvalues3(const Matrix& m) {
  auto ev = cubic_roots(characteristic_polynomial(m));
  std::sort(ev.begin(), ev.end(), [](const auto& x, const auto& y) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax != ay) return ax > ay;
    return x.real() > y.real();
  });
  return ev;
}

}  // namespace fpdyn

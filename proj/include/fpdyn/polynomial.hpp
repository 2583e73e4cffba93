#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "fpdyn/linalg.hpp"

namespace fpdyn {

// Coefficients highest degree first: c[0] x^3 + c[1] x^2 + c[2] x + c[3].
using Cubic = std::array<double, 4>;

double eval_cubic(const Cubic& c, double x);
double eval_cubic_derivative(const Cubic& c, double x);

// Newton iteration safeguarded by bisection on [lo, hi]; f(lo) and f(hi) must
// differ in sign. Stops when |f| <= ftol or the bracket collapses.
double bracketed_newton(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo, double hi,
                        double ftol = 1e-14);

double cubic_root_in(const Cubic& c, double lo, double hi, double ftol = 1e-14);

// All three roots, complex pairs included. Real roots are polished by Newton.
std::array<std::complex<double>, 3> cubic_roots(const Cubic& c);

// det(lambda I - M) = lambda^3 + c1 lambda^2 + c2 lambda + c3, returned as {1, c1, c2, c3}.
Cubic characteristic_polynomial(const Matrix& m);

// Sorted by descending modulus, ties by descending real part.
std::array<std::complex<double>, 3> eigenvalues3(const Matrix& m);

}  // namespace fpdyn

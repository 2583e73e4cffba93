#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "fpdyn/flow.hpp"
#include "fpdyn/polynomial.hpp"

namespace fpdyn {

enum class OrbitKind { Clockwise, Anticlockwise, JOrbit };

std::string to_string(OrbitKind k);

Cubic clockwise_cubic(double beta);
Cubic anticlockwise_cubic(double beta);

struct PeriodicOrbitSpec {
  OrbitKind kind = OrbitKind::Clockwise;
  double beta = 0.0;
  double root = 0.0;  // nu (clockwise), mu (anticlockwise), X* (J orbit)
  Vec section_n;      // vA at the section
  Vec section_m;      // vB at the section
  double t1 = 0.0;
  double t2 = 0.0;
  std::vector<Segment> full_path;  // six segments from the section back to it
  double diameter = 0.0;
  double closure_residual = 0.0;
};

// Max pairwise distance, in the utility max-norm, between the segment start states.
double orbit_diameter(const std::vector<Segment>& path);

PeriodicOrbitSpec clockwise_orbit(double beta);
PeriodicOrbitSpec anticlockwise_orbit(double beta);

// Two-leg gap map on J and its fixed point.
double j_map_F(double beta, double x);
double j_fixed_point(double beta);
double j_map_derivative_at_zero(double beta);

struct JOrbitSpec {
  PeriodicOrbitSpec orbit;
  double ratio_b = 0.0;  // (b^2+b-1)/(2b+1)
  double ratio_a = 0.0;  // (b^2+b-1)/(1+b)^2
  // the same ratios recomputed from the simulated section value n1
  double ratio_b_from_n1 = 0.0;
  double ratio_a_from_n1 = 0.0;
  std::vector<StateV> endpoints;  // state at the end of each leg
};

JOrbitSpec j_orbit(double beta);

// One-third return map in perturbation coordinates (e1, e2, e3), with the
// cyclic relabeling applied so that the section maps to itself.
Vec section_return(const PeriodicOrbitSpec& orbit, const Vec& eps);

// Central differences with step h and one Richardson extrapolation.
Matrix numerical_section_jacobian(const PeriodicOrbitSpec& orbit, double h = 1e-6);

// Closed-form linearization of the anticlockwise one-third map.
Matrix anticlockwise_stability_closed_form(double beta, double n1, double n2);
// Closed-form pair of eigenvalues (the third one is n2/n1).
std::array<std::complex<double>, 2> anticlockwise_eigenvalue_pair(double beta, double n1, double n2);

enum class Stability { Attracting, SaddleType, NonGeneric };

std::string to_string(Stability s);

struct StabilityReport {
  OrbitKind kind = OrbitKind::Anticlockwise;
  double beta = 0.0;
  Matrix matrix;
  std::array<std::complex<double>, 3> eigenvalues;
  Stability classification = Stability::NonGeneric;
  bool numerical = false;  // built by finite differences
};

// Anticlockwise orbit for beta > sigma (closed form), clockwise for beta < sigma (numerical).
StabilityReport stability_matrix(double beta);

struct TauResult {
  double tau = 0.0;
  double g = 0.0;  // most negative real eigenvalue + 1 at tau
  int iterations = 0;
};

TauResult find_tau(double lo, double hi, double tol = 1e-6);
TauResult find_tau();

}  // namespace fpdyn

#include "fpdyn/sampling.hpp"

namespace fpdyn {

Vec sample_simplex(Rng& rng, std::size_t n) {
  std::exponential_distribution<double> expo(1.0);
  Vec x(n);
  double s = 0.0;
  for (double& c : x) {
    c = expo(rng);
    s += c;
  }
  for (double& c : x) c /= s;
  return x;
}

StateP sample_state(Rng& rng, std::size_t n) {
  SimplexPoint pa(sample_simplex(rng, n));
  SimplexPoint pb(sample_simplex(rng, n));
  return {pa, pb};
}

}  // namespace fpdyn

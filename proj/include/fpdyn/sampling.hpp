#pragma once

#include <cstdint>
#include <random>

#include "fpdyn/game.hpp"

namespace fpdyn {

using Rng = std::mt19937_64;

// Uniform on the simplex: normalized exponential variates.
Vec sample_simplex(Rng& rng, std::size_t n);
StateP sample_state(Rng& rng, std::size_t n);

}  // namespace fpdyn

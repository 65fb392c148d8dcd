#pragma once

#include <random>

#include "otdual/serialize.hpp"

namespace otdual {

/// Uniform-ish rational marginals with denominator `denominator` and integer costs in [0, cost_max].
Instance random_instance(std::mt19937_64& rng, std::size_t nx, std::size_t ny, unsigned cost_max = 4,
                         unsigned denominator = 24);

/// Marginals built from blocks with μ(X_b) = ν(Y_b) for every block, so optimal
/// plans can split along the blocks (tied partial masses, disconnected supports).
Instance random_degenerate_instance(std::mt19937_64& rng, std::size_t nx, std::size_t ny, unsigned cost_max = 3,
                                    unsigned denominator = 24);

/// Random point of the simplex with every coordinate at least 1/(4n), exact rational.
std::vector<Rational> random_interior_weights(std::mt19937_64& rng, std::size_t n, unsigned denominator = 96);

}  // namespace otdual

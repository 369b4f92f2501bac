#pragma once

#include <random>

#include "eb/bridge.hpp"

namespace eb::sampling {

/// Random matrix with N(0,1) entries shifted to put every eigenvalue real
/// part at or below -margin, margin drawn from [0.3, 1].
Matrix random_hurwitz(std::mt19937_64& rng, int n);

/// Random n x m gain with smallest singular value at least 0.2 of the largest.
Matrix random_gain(std::mt19937_64& rng, int n, int m);

/// Random SPD matrix with spectrum in [lo, hi].
SpdMatrix random_spd(std::mt19937_64& rng, int n, double lo, double hi);

Vector random_vector(std::mt19937_64& rng, int n, double scale);

/// Random valid model; m is n or n+1.
SystemModel random_model(std::mt19937_64& rng, int n);

/// Random well-conditioned bridge problem with T in [t_lo, t_hi].
BridgeProblem random_bridge(std::mt19937_64& rng, int n, double t_lo, double t_hi);

}  // namespace eb::sampling

#pragma once

#include "slackal/common.hpp"

#include <cstdint>

namespace slackal {

// n-point Latin hypercube on [0,1]^d, one point per row. Each coordinate
// visits every one of the n strata exactly once, jittered uniformly inside
// the stratum. Deterministic for a given seed.
Matrix latin_hypercube(int n, int d, std::uint64_t seed);

// Latin hypercube scaled onto `box`.
Matrix latin_hypercube(int n, const Box& box, std::uint64_t seed);

} // namespace slackal

#include "slackal/lhs.hpp"
#include "slackal/errors.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace slackal {

Matrix latin_hypercube(int n, int d, std::uint64_t seed) {
    if (n < 1 || d < 1) throw ShapeError("latin_hypercube needs n >= 1 and d >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    Matrix points(n, d);
    std::vector<int> strata(n);
    for (int j = 0; j < d; ++j) {
        std::iota(strata.begin(), strata.end(), 0);
        std::shuffle(strata.begin(), strata.end(), rng);
        for (int i = 0; i < n; ++i) {
            points(i, j) = (strata[i] + jitter(rng)) / n;
        }
    }
    return points;
}

Matrix latin_hypercube(int n, const Box& box, std::uint64_t seed) {
    Matrix unit = latin_hypercube(n, box.dim(), seed);
    for (int i = 0; i < n; ++i) {
        unit.row(i) = box.from_unit(unit.row(i).transpose()).transpose();
    }
    return unit;
}

} // namespace slackal

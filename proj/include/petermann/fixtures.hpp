#pragma once

#include "petermann/coupling.hpp"

#include <cstdint>
#include <optional>

namespace petermann {

// Deterministic scenario sampler for the built-in selftest fixtures and the
// verification suites. Draws are derived from raw mt19937_64 output (not
// std::uniform_real_distribution) so sequences are identical on every
// platform.
class FixtureRng {
public:
    explicit FixtureRng(std::uint64_t seed) : state_(seed) {}

    double uniform();  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    Eigen::Index uniform_index(Eigen::Index lo, Eigen::Index hi);  // inclusive bounds
    std::uint64_t raw();

private:
    std::uint64_t state_;
};

struct RandomScenario {
    ModeBasis basis;
    CouplingMatrix gain;
    std::optional<CouplingMatrix> loss;
};

// Box basis with n ∈ [min_modes, max_modes] modes on a π-length box and
// random interval gain (plus optional random interval loss). The grid is
// sized so orthonormality holds at kOrthonormalityTol for the highest mode.
RandomScenario random_scenario(FixtureRng& rng, Eigen::Index min_modes, Eigen::Index max_modes,
                               bool with_loss);

// Random coefficient vector with entries in the complex unit box, away from
// the self-orthogonal set.
Eigen::VectorXcd random_vector(FixtureRng& rng, Eigen::Index n);

} // namespace petermann

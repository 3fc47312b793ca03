#include "petermann/fixtures.hpp"

#include <cmath>

namespace petermann {

std::uint64_t FixtureRng::raw() {
    // splitmix64; tiny, stable, plenty for fixture sampling
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double FixtureRng::uniform() {
    return static_cast<double>(raw() >> 11) * 0x1.0p-53;
}

Eigen::Index FixtureRng::uniform_index(Eigen::Index lo, Eigen::Index hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<Eigen::Index>(raw() % span);
}

RandomScenario random_scenario(FixtureRng& rng, Eigen::Index min_modes, Eigen::Index max_modes,
                               bool with_loss) {
    const Eigen::Index n = rng.uniform_index(min_modes, max_modes);
    const double length = M_PI;
    // ~100 points per mode keeps the Gram residual of the highest sine mode
    // safely below the 1e-6 orthonormality tolerance.
    const Eigen::Index points = 100 * n + 1;

    RandomScenario sc;
    sc.basis = make_box_basis(n, length, points);

    const auto random_interval = [&](ReservoirKind kind, double strength) {
        const double a = rng.uniform(0.0, 0.45 * length);
        const double b = rng.uniform(a + 0.25 * length, length);
        return build_coupling(sc.basis, interval_profile(sc.basis, a, b, strength, kind));
    };

    sc.gain = random_interval(ReservoirKind::gain, rng.uniform(0.3, 1.5));
    if (with_loss) sc.loss = random_interval(ReservoirKind::loss, rng.uniform(0.3, 1.5));
    return sc;
}

Eigen::VectorXcd random_vector(FixtureRng& rng, Eigen::Index n) {
    Eigen::VectorXcd c(n);
    for (Eigen::Index i = 0; i < n; ++i)
        c[i] = std::complex<double>(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    if (c.norm() == 0.0) c[0] = 1.0;
    return c.normalized();
}

} // namespace petermann

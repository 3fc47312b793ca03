// Gain/loss coupling matrices from reservoir profiles (overlap integrals).

#include <doctest.h>

#include "petermann/coupling.hpp"
#include "petermann/errors.hpp"
#include "petermann/fixtures.hpp"

#include <cmath>

using namespace petermann;

TEST_CASE("uniform full-volume profile gives a diagonal matrix g*eps_i^2") {
    const ModeBasis basis = make_box_basis(4, M_PI, 257);
    const double g = 1.7;
    const CouplingMatrix m = build_coupling(basis, uniform_profile(basis, g, ReservoirKind::gain));

    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(m.m(i, i) == doctest::Approx(g * basis.eps[i] * basis.eps[i]).epsilon(1e-9));
        for (Eigen::Index j = 0; j < 4; ++j)
            if (i != j) CHECK(std::abs(m.m(i, j)) < 1e-6 * g);
    }
}

// ---------------------------------------------------------------------------
// Left half of a π-length box, modes 1 and 2:
//   ∫₀^{π/2} sin x · sin 2x dx = 2 ∫₀^{π/2} sin²x cos x dx = 2/3   (exact)
//   V' = π/2,  u_n = √2 sin(nx)  ⟹  (1/V')∫ u₁u₂ = (2·2/3)/(π/2) = 8/(3π)
//   m₁₂ = g ε₁ε₂ · 8/(3π) = g·√2·8/(3π)   with ω = (1, 2)
// Endpoint π/2 lands on a node of the 2049-point grid, so the sampled step
// is exact under the midpoint convention.
// ---------------------------------------------------------------------------
TEST_CASE("half-box interval overlap matches the symbolic oracle") {
    const ModeBasis basis = make_box_basis(2, M_PI, 2049);
    const double g = 0.9;
    const CouplingMatrix m =
        build_coupling(basis, interval_profile(basis, 0.0, M_PI / 2.0, g, ReservoirKind::gain));

    const double expected = g * std::sqrt(2.0) * 8.0 / (3.0 * M_PI);
    CHECK(m.m(0, 1) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(m.m(1, 0) == m.m(0, 1));  // symmetrized exactly
}

TEST_CASE("zero strength gives the zero matrix") {
    const ModeBasis basis = make_box_basis(3, M_PI, 257);
    const CouplingMatrix m = build_coupling(basis, uniform_profile(basis, 0.0, ReservoirKind::loss));
    CHECK(m.m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero-measure profile is rejected") {
    const ModeBasis basis = make_box_basis(3, M_PI, 257);
    ReservoirProfile p = uniform_profile(basis, 1.0, ReservoirKind::gain);
    p.indicator.setZero();
    CHECK_THROWS_AS(build_coupling(basis, p), config_error);
}

TEST_CASE("negative indicators are rejected") {
    const ModeBasis basis = make_box_basis(3, M_PI, 257);
    ReservoirProfile p = uniform_profile(basis, 1.0, ReservoirKind::gain);
    p.indicator[10] = -0.25;
    CHECK_THROWS_AS(build_coupling(basis, p), config_error);
}

TEST_CASE("coupling is linear in the indicator with measure weights") {
    // m(a+b) = (V'_a m(a) + V'_b m(b)) / (V'_a + V'_b)
    const ModeBasis basis = make_box_basis(5, M_PI, 401);
    const ReservoirProfile pa = interval_profile(basis, 0.2, 1.3, 1.0, ReservoirKind::gain);
    const ReservoirProfile pb = interval_profile(basis, 1.8, 2.9, 1.0, ReservoirKind::gain);
    ReservoirProfile pab = pa;
    pab.indicator += pb.indicator;

    const double va = basis.grid.integrate(pa.indicator);
    const double vb = basis.grid.integrate(pb.indicator);
    const Eigen::MatrixXd combined = build_coupling(basis, pab).m;
    const Eigen::MatrixXd weighted =
        (va * build_coupling(basis, pa).m + vb * build_coupling(basis, pb).m) / (va + vb);
    CHECK((combined - weighted).cwiseAbs().maxCoeff() < 1e-10 * combined.cwiseAbs().maxCoeff());
}

TEST_CASE("coupling matrices are symmetric and positive semi-definite") {
    FixtureRng rng(1234);
    for (int trial = 0; trial < 8; ++trial) {
        const RandomScenario sc = random_scenario(rng, 2, 8, false);
        const Eigen::MatrixXd& m = sc.gain.m;
        const double scale = m.cwiseAbs().maxCoeff();
        CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * scale);
    }
}

TEST_CASE("scale_to_rate rescales the rate functional linearly") {
    const ModeBasis basis = make_box_basis(4, M_PI, 401);
    const CouplingMatrix m =
        build_coupling(basis, interval_profile(basis, 0.3, 2.0, 1.1, ReservoirKind::gain));
    FixtureRng rng(777);
    const Eigen::VectorXcd c = random_vector(rng, 4);

    SUBCASE("rate 2 -> target 1 halves the matrix") {
        const CouplingMatrix two = scale_to_rate(m, basis.eps, c, 2.0);
        const CouplingMatrix one = scale_to_rate(two, basis.eps, c, 1.0);
        CHECK((one.m - 0.5 * two.m).cwiseAbs().maxCoeff() <= 1e-14 * two.m.cwiseAbs().maxCoeff());
    }
    SUBCASE("target equal to the current rate is the identity") {
        const double rate = rate_on_vector(m, basis.eps, c);
        const CouplingMatrix same = scale_to_rate(m, basis.eps, c, rate);
        CHECK((same.m - m.m).cwiseAbs().maxCoeff() <= 1e-15 * m.m.cwiseAbs().maxCoeff());
    }
    SUBCASE("rate recomputed after scaling equals the target") {
        const double target = 0.3125;
        const CouplingMatrix scaled = scale_to_rate(m, basis.eps, c, target);
        CHECK(rate_on_vector(scaled, basis.eps, c) ==
              doctest::Approx(target).epsilon(1e-12));
    }
    SUBCASE("zero current rate cannot be scaled") {
        CouplingMatrix zero = m;
        zero.m.setZero();
        CHECK_THROWS_AS(scale_to_rate(zero, basis.eps, c, 1.0), numeric_error);
    }
}

// Universe-mode basis: grid quadrature, box modes, custom-basis validation.

#include <doctest.h>

#include "petermann/basis.hpp"
#include "petermann/errors.hpp"

#include <cmath>

using namespace petermann;

TEST_CASE("simpson weights integrate smooth functions to high order") {
    const SpatialGrid g = make_uniform_grid(M_PI, 257);
    CHECK(g.weights.sum() == doctest::Approx(M_PI).epsilon(1e-14));

    // ∫₀^π sin x dx = 2, Simpson error ~ h⁴
    const Eigen::VectorXd f = g.x.array().sin();
    CHECK(g.integrate(f) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("odd interval counts fall back to a trapezoid tail") {
    // 256 points = 255 intervals; the rule still sums to the extent and
    // integrates low modes within the orthonormality tolerance.
    const SpatialGrid g = make_uniform_grid(M_PI, 256);
    CHECK(g.weights.sum() == doctest::Approx(M_PI).epsilon(1e-14));
    const Eigen::VectorXd f = g.x.array().sin();
    CHECK(g.integrate(f) == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("grid validation rejects tiny grids") {
    CHECK_THROWS_AS(make_uniform_grid(1.0, 32), config_error);
    CHECK_THROWS_AS(make_uniform_grid(-1.0, 128), config_error);
}

TEST_CASE("box basis: n=1 on a pi-length box has omega = eps = 1") {
    const ModeBasis b = make_box_basis(1, M_PI, 256);
    CHECK(b.omega[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.eps[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("box basis: sine modes are orthogonal under the grid quadrature") {
    const ModeBasis b = make_box_basis(2, M_PI, 256);
    const Eigen::MatrixXd gram = gram_matrix(b.grid, b.modes);
    CHECK(std::abs(gram(0, 1)) < 1e-6);
    CHECK(gram(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("box basis golden quadrature residual vs a 10x finer oracle") {
    const auto residual = [](const ModeBasis& b) {
        const Eigen::MatrixXd gram = gram_matrix(b.grid, b.modes);
        return (gram - Eigen::MatrixXd::Identity(b.n_modes(), b.n_modes()))
            .cwiseAbs()
            .maxCoeff();
    };
    const ModeBasis coarse = make_box_basis(8, 10.0, 2048);
    const ModeBasis fine = make_box_basis(8, 10.0, 20480);

    const double coarse_res = residual(coarse);
    const double fine_res = residual(fine);
    CHECK(coarse_res < 1e-6);      // module tolerance
    CHECK(fine_res < coarse_res);  // refinement actually helps
    // the fine grid is the oracle for the coarse one
    CHECK(coarse_res == doctest::Approx(fine_res).epsilon(1.0).scale(1e-6));
}

TEST_CASE("box basis: eps^2 equals omega to machine precision") {
    const ModeBasis b = make_box_basis(8, 3.7, 512);
    for (Eigen::Index n = 0; n < b.n_modes(); ++n)
        CHECK(std::abs(b.eps[n] * b.eps[n] - b.omega[n]) <= 1e-15 * b.omega[n]);
}

TEST_CASE("box basis refuses an unresolvable grid") {
    // precondition: grid_points >= 4*n_modes
    CHECK_THROWS_AS(make_box_basis(8, M_PI, 31), config_error);
    // 64 points cannot hold 16 sine modes to 1e-6; the error names a pair
    try {
        make_box_basis(16, M_PI, 64);
        FAIL("expected a resolution error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("worst pair") != std::string::npos);
    }
}

TEST_CASE("custom basis accepts an orthonormal pair and round-trips box modes") {
    const ModeBasis box = make_box_basis(2, M_PI, 128);
    const ModeBasis again = make_custom_basis(box.omega, box.modes, box.grid);
    CHECK((again.eps - box.eps).cwiseAbs().maxCoeff() == 0.0);  // identical eps

    SUBCASE("degenerate input names the offending pair") {
        Eigen::MatrixXd modes = box.modes;
        modes.col(1) = modes.col(0);  // u_2 := u_1
        try {
            make_custom_basis(box.omega, modes, box.grid);
            FAIL("expected a validation error");
        } catch (const config_error& e) {
            const std::string msg = e.what();
            CHECK(msg.find("(n=0, m=1)") != std::string::npos);
        }
    }

    SUBCASE("non-positive frequencies are rejected") {
        Eigen::VectorXd omega = box.omega;
        omega[1] = 0.0;
        CHECK_THROWS_AS(make_custom_basis(omega, box.modes, box.grid), config_error);
    }
}

TEST_CASE("carrier offset shifts every frequency and keeps the functions") {
    const ModeBasis plain = make_box_basis(3, M_PI, 256);
    const ModeBasis shifted = make_box_basis(3, M_PI, 256, 100.0);
    CHECK((shifted.omega - plain.omega).minCoeff() == doctest::Approx(100.0).epsilon(1e-15));
    CHECK((shifted.modes - plain.modes).cwiseAbs().maxCoeff() == 0.0);
    CHECK(shifted.eps[0] == doctest::Approx(std::sqrt(plain.omega[0] + 100.0)).epsilon(1e-15));
}

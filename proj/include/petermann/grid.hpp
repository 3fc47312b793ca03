#pragma once

#include <Eigen/Dense>

#include <complex>

namespace petermann {

// Uniform 1-D quadrature grid standing in for the quantization volume.
// Mode-overlap integrals are always of the form (1/extent)·∫f dx, so the
// grid carries its own weights and total length.
struct SpatialGrid {
    Eigen::VectorXd x;        // positions, strictly increasing
    Eigen::VectorXd weights;  // quadrature weights, all > 0, sum = extent
    double extent = 0.0;      // total universe length V

    Eigen::Index size() const { return x.size(); }

    double spacing() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }

    // ∫ f dx over the whole grid
    double integrate(const Eigen::VectorXd& f) const;
    std::complex<double> integrate(const Eigen::VectorXcd& f) const;

    // (1/V) ∫ f dx
    double average(const Eigen::VectorXd& f) const { return integrate(f) / extent; }
    std::complex<double> average(const Eigen::VectorXcd& f) const { return integrate(f) / extent; }

    // Throws config_error when an invariant is broken (monotonic x,
    // positive weights, Σw = extent, at least 64 points).
    void validate() const;
};

// Composite Simpson weights on [0, length]. Simpson needs an even interval
// count; with an odd count the last cell is closed by the trapezoid rule.
SpatialGrid make_uniform_grid(double length, Eigen::Index points);

} // namespace petermann

#include "petermann/grid.hpp"

#include "petermann/errors.hpp"

#include <cmath>
#include <string>

namespace petermann {

namespace {
constexpr Eigen::Index kMinPoints = 64;
}

double SpatialGrid::integrate(const Eigen::VectorXd& f) const {
    if (f.size() != weights.size()) throw std::invalid_argument("integrate: size mismatch");
    return weights.dot(f);
}

std::complex<double> SpatialGrid::integrate(const Eigen::VectorXcd& f) const {
    if (f.size() != weights.size()) throw std::invalid_argument("integrate: size mismatch");
    return (weights.cast<std::complex<double>>().array() * f.array()).sum();
}

void SpatialGrid::validate() const {
    const Eigen::Index n = x.size();
    if (n < kMinPoints)
        throw config_error("grid: need at least " + std::to_string(kMinPoints) + " points, got " +
                           std::to_string(n));
    if (weights.size() != n) throw config_error("grid: weights/positions size mismatch");
    for (Eigen::Index i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1])) throw config_error("grid: positions must be strictly increasing");
    if ((weights.array() <= 0.0).any())
        throw config_error("grid: quadrature weights must be positive");
    const double sum = weights.sum();
    if (!(extent > 0.0) || std::abs(sum - extent) > 1e-9 * extent)
        throw config_error("grid: weights sum " + std::to_string(sum) + " != extent " +
                           std::to_string(extent));
}

SpatialGrid make_uniform_grid(double length, Eigen::Index points) {
    if (!(length > 0.0)) throw config_error("grid: length must be positive");
    if (points < kMinPoints)
        throw config_error("grid: need at least " + std::to_string(kMinPoints) + " points");

    SpatialGrid g;
    g.extent = length;
    g.x = Eigen::VectorXd::LinSpaced(points, 0.0, length);
    g.weights = Eigen::VectorXd::Zero(points);

    const double h = length / static_cast<double>(points - 1);
    const Eigen::Index intervals = points - 1;
    // Simpson needs an even interval count; an odd count keeps O(h⁴) by
    // closing the last three intervals with the 3/8 rule.
    const Eigen::Index simpson = (intervals % 2 == 0) ? intervals : intervals - 3;
    if (simpson > 0) {
        g.weights[0] += h / 3.0;
        g.weights[simpson] += h / 3.0;
        for (Eigen::Index k = 1; k < simpson; ++k)
            g.weights[k] += (k % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
    }
    if (simpson < intervals) {
        g.weights[simpson] += 3.0 * h / 8.0;
        g.weights[simpson + 1] += 9.0 * h / 8.0;
        g.weights[simpson + 2] += 9.0 * h / 8.0;
        g.weights[intervals] += 3.0 * h / 8.0;
    }
    g.validate();
    return g;
}

} // namespace petermann

#include "petermann/basis.hpp"

#include "petermann/errors.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace petermann {

namespace {

// Largest |G − I| entry with its index pair.
struct GramResidual {
    double value = 0.0;
    Eigen::Index n = 0;
    Eigen::Index m = 0;
};

GramResidual worst_gram_deviation(const Eigen::MatrixXd& gram) {
    GramResidual worst;
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
        for (Eigen::Index j = 0; j < gram.cols(); ++j) {
            const double target = (i == j) ? 1.0 : 0.0;
            const double dev = std::abs(gram(i, j) - target);
            if (dev > worst.value) worst = {dev, i, j};
        }
    }
    return worst;
}

void check_orthonormal(const SpatialGrid& grid, const Eigen::MatrixXd& modes,
                       const char* context) {
    const GramResidual worst = worst_gram_deviation(gram_matrix(grid, modes));
    if (worst.value > kOrthonormalityTol) {
        std::ostringstream msg;
        msg << context << ": mode functions not orthonormal on this grid; worst pair (n=" << worst.n
            << ", m=" << worst.m << ") deviates by " << worst.value << " (tolerance "
            << kOrthonormalityTol << ")";
        throw config_error(msg.str());
    }
}

void check_frequencies(const Eigen::VectorXd& omega) {
    for (Eigen::Index n = 0; n < omega.size(); ++n)
        if (!std::isfinite(omega[n]) || !(omega[n] > 0.0))
            throw config_error("basis: frequency omega[" + std::to_string(n) +
                               "] must be positive and finite");
}

} // namespace

Eigen::MatrixXd gram_matrix(const SpatialGrid& grid, const Eigen::MatrixXd& modes) {
    if (modes.rows() != grid.size())
        throw std::invalid_argument("gram_matrix: modes not sampled on this grid");
    return modes.transpose() * grid.weights.asDiagonal() * modes / grid.extent;
}

ModeBasis make_box_basis(Eigen::Index n_modes, double box_length, Eigen::Index grid_points,
                         double omega_offset) {
    if (n_modes < 1) throw config_error("basis: n_modes must be >= 1");
    if (!(box_length > 0.0)) throw config_error("basis: box_length must be positive");
    if (grid_points < 4 * n_modes)
        throw config_error("basis: grid_points must be >= 4*n_modes to resolve the highest mode");
    if (!(omega_offset >= 0.0) || !std::isfinite(omega_offset))
        throw config_error("basis: omega_offset must be finite and >= 0");

    ModeBasis basis;
    basis.grid = make_uniform_grid(box_length, grid_points);
    basis.omega.resize(n_modes);
    basis.modes.resize(grid_points, n_modes);
    const double k0 = M_PI / box_length;  // unit wave speed: ω_n = nπ/L
    for (Eigen::Index n = 0; n < n_modes; ++n) {
        const double kn = static_cast<double>(n + 1) * k0;
        basis.omega[n] = omega_offset + kn;
        basis.modes.col(n) = (std::sqrt(2.0) * (kn * basis.grid.x.array()).sin()).matrix();
    }
    basis.eps = basis.omega.cwiseSqrt();
    check_orthonormal(basis.grid, basis.modes, "box basis");
    return basis;
}

ModeBasis make_custom_basis(Eigen::VectorXd omega, Eigen::MatrixXd modes, SpatialGrid grid) {
    grid.validate();
    if (modes.rows() != grid.size())
        throw config_error("basis: mode samples do not match the grid size");
    if (modes.cols() != omega.size())
        throw config_error("basis: need one frequency per mode function");
    if (omega.size() < 1) throw config_error("basis: need at least one mode");
    check_frequencies(omega);
    check_orthonormal(grid, modes, "custom basis");

    ModeBasis basis;
    basis.grid = std::move(grid);
    basis.eps = omega.cwiseSqrt();
    basis.omega = std::move(omega);
    basis.modes = std::move(modes);
    return basis;
}

} // namespace petermann

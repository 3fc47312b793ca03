#pragma once

#include "petermann/grid.hpp"

#include <Eigen/Dense>

namespace petermann {

// Elementwise tolerance for the quadrature Gram matrix vs identity.
inline constexpr double kOrthonormalityTol = 1e-6;

// Truncated set of universe modes: real orthonormal mode functions sampled
// on a spatial grid, with their frequencies and vacuum amplitudes.
// Natural units ħ = 2ε₀V = 1, so ε_n = √ω_n.
struct ModeBasis {
    SpatialGrid grid;
    Eigen::VectorXd omega;  // mode frequencies, all > 0 (rad/time)
    Eigen::VectorXd eps;    // vacuum amplitudes, ε_n = √ω_n
    Eigen::MatrixXd modes;  // grid.size() × n_modes, one mode function per column

    Eigen::Index n_modes() const { return omega.size(); }
};

// Quadrature Gram matrix G_nm = (1/V)∫u_n u_m dx of a candidate mode set.
Eigen::MatrixXd gram_matrix(const SpatialGrid& grid, const Eigen::MatrixXd& modes);

// Sine modes of a 1-D box: u_n(x) = √2 sin(nπx/L) on [0, L], ω_n = nπ/L
// (unit wave speed) plus an optional carrier offset added to every ω_n.
// Requires grid_points ≥ 4·n_modes; fails with the worst offending mode
// pair when the grid cannot resolve orthonormality to kOrthonormalityTol.
ModeBasis make_box_basis(Eigen::Index n_modes, double box_length, Eigen::Index grid_points,
                         double omega_offset = 0.0);

// Wraps user-supplied sampled mode functions. Validates orthonormality and
// ω > 0, and derives ε = √ω.
ModeBasis make_custom_basis(Eigen::VectorXd omega, Eigen::MatrixXd modes, SpatialGrid grid);

} // namespace petermann

#pragma once

#include "petermann/basis.hpp"

#include <Eigen/Dense>

namespace petermann {

enum class ReservoirKind { gain, loss };

// Spatial density of reservoir atoms (dimensionless shape) with one overall
// rate constant g that absorbs Rτ²d²/ħ².
struct ReservoirProfile {
    Eigen::VectorXd indicator;  // ≥ 0 everywhere, sampled on the basis grid
    double strength = 0.0;      // g ≥ 0 (1/time)
    ReservoirKind kind = ReservoirKind::gain;
};

// Real symmetric, positive semi-definite mode-coupling matrix
//   m_ij = g · ε_iε_j · (1/V')∫ indicator·u_i·u_j dx,   V' = ∫indicator dx.
struct CouplingMatrix {
    Eigen::MatrixXd m;
    ReservoirKind kind = ReservoirKind::gain;

    Eigen::Index size() const { return m.rows(); }
};

// Profile constructors. Interval endpoints that land exactly on an interior
// grid node are sampled at ½ (midpoint convention for steps), which keeps
// the discrete measure of the interval exact.
ReservoirProfile uniform_profile(const ModeBasis& basis, double strength, ReservoirKind kind);
ReservoirProfile interval_profile(const ModeBasis& basis, double a, double b, double strength,
                                  ReservoirKind kind);

// Overlap-integral assembly of Eq.-(7) shape; symmetrized after quadrature
// and checked positive semi-definite. Throws config_error on a zero-measure
// profile.
CouplingMatrix build_coupling(const ModeBasis& basis, const ReservoirProfile& profile);

// Rate functional Σ_nm m_nm ε_n ε_m c_n* c_m / Σ_n ε_n²|c_n|².
// Real for symmetric m; the tiny imaginary residue is discarded.
double rate_on_vector(const CouplingMatrix& coupling, const Eigen::VectorXd& eps,
                      const Eigen::VectorXcd& c);

// Rescales the matrix so its rate functional on c equals target_rate.
// Throws numeric_error when the current rate is zero.
CouplingMatrix scale_to_rate(const CouplingMatrix& coupling, const Eigen::VectorXd& eps,
                             const Eigen::VectorXcd& c, double target_rate);

} // namespace petermann

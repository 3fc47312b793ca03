#pragma once

#include "petermann/spectral.hpp"

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

namespace petermann {

// Everything derived from one selected quasi-mode eigenvector:
// frequency Ω, rates λ and γ, norms, probabilities, the excess-noise
// factors, and the sampled quasi-mode functions.
struct QuasiModeReport {
    Eigen::Index index = -1;          // position in the QuasiModeSet
    std::complex<double> eigenvalue;  // μ = (λ−γ)/2 − iΩ
    Eigen::VectorXcd c;               // expansion coefficients
    std::complex<double> S;           // self-overlap Σ ε² c²

    double Omega = 0.0;   // mean frequency under p_n
    double lambda = 0.0;  // amplification rate
    double gamma = 0.0;   // damping rate (0 without loss)
    double E_nu = 0.0;    // quasi-mode vacuum amplitude √Ω
    double N2 = 0.0;      // quasi-mode function norm
    double N2_bar = 0.0;  // adjoint function norm
    Eigen::VectorXd p;    // probabilities ε²|c|²/Σε²|c|²

    double K = 0.0;        // quantum excess-noise factor
    double K_tilde = 0.0;  // semi-classical factor N²·N̄²
    double ratio = 0.0;    // K̃/K = Ω·Σ p_n/ω_n

    Eigen::VectorXcd U;      // quasi-mode function on the grid
    Eigen::VectorXcd U_bar;  // adjoint quasi-mode function on the grid
    Eigen::VectorXd eps;     // basis vacuum amplitudes (report is self-contained)

    // Diagnostics (not used by any formula downstream):
    double sum_eps2_abs_c2 = 0.0;           // Σ ε²|c|²
    double omega_spread = 0.0;              // √(Σ p_n (ω_n − Ω)²), quasi-mode bandwidth
    double Omega_amplitude_weighted = 0.0;  // Σ ω|c|²/Σ|c|², the |c|²-weighted mean
};

// Derives a full report from eigenvector #index of the set. Throws
// numeric_error when the mode is flagged self-orthogonal (K diverges).
QuasiModeReport analyze(const QuasiModeSet& set, Eigen::Index index, const ModeBasis& basis,
                        const CouplingMatrix& gain, const CouplingMatrix* loss = nullptr);

// Core used by analyze and by gauge-freedom tests: everything from a raw
// coefficient vector. eigenvalue is attached by the caller.
QuasiModeReport analyze_vector(const Eigen::VectorXcd& c, const ModeBasis& basis,
                               const CouplingMatrix& gain, const CouplingMatrix* loss = nullptr);

// Max deviation of the sampled functions from Eq.-(19) orthonormality:
// off-diagonal |(1/V)∫U_ν Ū_μ dx| and diagonal |(1/V)∫U_ν Ū_ν dx − 1|.
double quasimode_orthogonality_residual(const std::vector<QuasiModeReport>& reports,
                                        const SpatialGrid& grid);

// Relative deviation between the quadrature and algebraic routes to the
// norms: (|∫|U|²/V − N²|/N², same for N̄²).
std::pair<double, double> norm_consistency(const QuasiModeReport& report, const SpatialGrid& grid);

} // namespace petermann

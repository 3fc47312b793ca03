#pragma once

#include "petermann/coupling.hpp"

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

namespace petermann {

// Non-Hermitian quasi-mode system matrix
//   a_mn = (½L_mn − ½Γ_mn − i δ_nm ω_n) · ε_n/ε_m,   Γ = 0 when absent.
// Because L and Γ are symmetric, a is similar to a complex symmetric matrix
// through diag(ε); the left eigenvector of a right pair c is ε²∘c.
struct SystemMatrix {
    Eigen::MatrixXcd a;
    Eigen::VectorXd omega;
    Eigen::VectorXd eps;
    Eigen::MatrixXd gain;                 // L
    std::optional<Eigen::MatrixXd> loss;  // Γ
};

SystemMatrix assemble(const ModeBasis& basis, const CouplingMatrix& gain,
                      const CouplingMatrix* loss = nullptr);

// Full eigendecomposition of the system matrix. Eigenpairs are sorted by
// descending Re μ (then descending Im μ); each right vector has unit
// Euclidean norm with its largest-modulus entry made real positive.
struct QuasiModeSet {
    Eigen::VectorXcd eigenvalues;    // μ_ν = λ_ν/2 − iΩ_ν (net rate λ)
    Eigen::MatrixXcd right_vectors;  // columns c^(ν)
    Eigen::MatrixXcd left_vectors;   // columns, ε²-scaled right vectors (verified)
    Eigen::VectorXcd self_overlaps;  // S_ν = Σ_n ε_n² (c_n^(ν))²
    Eigen::VectorXd residuals;       // ‖a c − μ c‖ per pair
    Eigen::VectorXd eps;             // carried for downstream functionals
    std::vector<bool> self_orthogonal;    // |S_ν| below threshold: excluded from selection
    std::vector<bool> left_from_fallback; // left vector needed inverse iteration
    double matrix_norm = 0.0;             // Frobenius norm of a

    Eigen::Index size() const { return eigenvalues.size(); }
};

// Relative self-overlap floor: flag mode ν when |S_ν| ≤ 1e-12·Σ ε²|c|².
inline constexpr double kSelfOverlapFloor = 1e-12;

QuasiModeSet eigendecompose(const SystemMatrix& sys);
// Core entry for matrices built elsewhere (tests, loss-only problems).
QuasiModeSet eigendecompose(const Eigen::MatrixXcd& a, const Eigen::VectorXd& eps);

// Max over ν≠μ of |Σ ε² c^(ν) c^(μ)| / √(|S_ν||S_μ|). Eigenvalue pairs
// closer than 1e-8·‖a‖ are reported as degenerate (orthogonality is then
// not guaranteed), never silently perturbed.
struct BiorthogonalityCheck {
    double residual = 0.0;
    bool degenerate = false;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> close_pairs;
};
BiorthogonalityCheck biorthogonality_residual(const QuasiModeSet& set);

// Elementwise max |Σ_ν ε_n² c_n^(ν) c_m^(ν) / S_ν − δ_nm|. Throws
// numeric_error when a flagged self-orthogonal mode makes the sum undefined.
double completeness_residual(const QuasiModeSet& set);

// Index of the maximal-Re(μ) non-flagged mode; ties broken by minimal
// |Im μ + target_frequency| when a target is given, else lowest index.
Eigen::Index select_dominant(const QuasiModeSet& set,
                             std::optional<double> target_frequency = std::nullopt);

} // namespace petermann

#pragma once

#include "petermann/quasimode.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace petermann {

// Step-size rule for the fixed-step RK4 integrator: dt·max_rate ≤ 1e-3.
inline constexpr double kStepBudget = 1e-3;

// Closed linear generator for the first and second operator moments of the
// multimode master equation, expressed in a frame rotating at
// frame_frequency:
//   d⟨a⟩/dt  = M ⟨a⟩
//   dν/dt    = M̄ ν + ν M + L        (ν_mn = ⟨a_m†a_n⟩, gain source L)
//   dα/dt    = M α + α M             (α_mn = ⟨a_n a_m⟩, no source)
// with the complex symmetric drift M = ½(L−Γ) − i·diag(ω − frame).
struct MomentGenerator {
    Eigen::MatrixXcd drift;               // M
    Eigen::MatrixXd source;               // L
    Eigen::MatrixXd gain;                 // L kept for rate functionals
    std::optional<Eigen::MatrixXd> loss;  // Γ
    Eigen::VectorXd omega;
    double frame_frequency = 0.0;

    Eigen::Index size() const { return drift.rows(); }

    // Stiffness scale for the dt rule: max row sum of |M| (covers both the
    // coupling rates and the rotating-frame detunings).
    double max_rate() const;
};

MomentGenerator derive_moment_generator(const CouplingMatrix& gain, const CouplingMatrix* loss,
                                        const Eigen::VectorXd& omega,
                                        double frame_frequency = 0.0);

double suggested_dt(const MomentGenerator& gen);

// First and second moments of all universe-mode operators.
struct MomentState {
    double t = 0.0;
    Eigen::VectorXcd mean;       // ⟨a_n⟩
    Eigen::MatrixXcd normal;     // ⟨a_m† a_n⟩, Hermitian
    Eigen::MatrixXcd anomalous;  // ⟨a_n a_m⟩, symmetric
};

MomentState vacuum_state(Eigen::Index n_modes);

// Classical fixed-step RK4. Refuses (numeric_error with a suggested dt)
// when dt violates the step budget.
MomentState evolve(const MomentState& state, const MomentGenerator& gen, double t_final,
                   double dt);

namespace detail {
// Raw RK4 step without the budget gate; for convergence studies.
void rk4_step(MomentState& state, const MomentGenerator& gen, double h);
}

// Where to read the quadrature X̂ = 𝓔(U Â e^{iΩt} + U*Â†e^{−iΩt}) of one
// quasi mode: at a grid point, or position-averaged (|U|² → N²).
struct QuadratureProbe {
    const QuasiModeReport* report = nullptr;
    std::optional<Eigen::Index> position;  // grid index; absent = averaged
    double rotating_frequency = 0.0;       // must equal report->Omega
};

QuadratureProbe make_probe(const QuasiModeReport& report,
                           std::optional<Eigen::Index> position = std::nullopt);

// (ΔX)² evaluated exactly from the state's moments. state_frame is the
// rotating frequency the state was evolved in (phases are reconciled with
// the probe frame through state.t).
double quadrature_variance(const MomentState& state, const QuadratureProbe& probe,
                           double state_frame);

struct NoiseTrace {
    Eigen::VectorXd times;
    Eigen::VectorXd variance;      // position-averaged (ΔX)²(t)
    double slope_fit = 0.0;        // linear growth rate where applicable
    double max_rel_deviation = 0.0;
    bool passed = false;
    std::string note;
};

// Integrates the moments from vacuum and compares the variance against the
// closed-form solution of the gain-only noise law
//   (ΔX̄)²(t) = 𝓔²K(2e^{λt} − 1),   (ΔX(x))²(t) = |U(x)|²Σε²|c|²(2e^{λt} − 1),
// position-averaged and at the given probe positions. Pass iff the max
// relative deviation stays below 1e-6. horizon ≤ 0 means 3/λ.
NoiseTrace verify_noise_law(const QuasiModeReport& report, const MomentGenerator& gen,
                            double horizon = 0.0,
                            const std::vector<Eigen::Index>& probe_positions = {});

// At threshold (γ = λ within 1e-10 relative) the variance is affine in t;
// fits the slope over the second half of the horizon (default 5/λ) and
// passes iff it matches 2λ𝓔²K to 1e-4 relative.
NoiseTrace verify_threshold_diffusion(const QuasiModeReport& report, const MomentGenerator& gen,
                                      double horizon = 0.0);

// Threshold linewidth bookkeeping, in photon-energy units:
//   I = 4𝓔²N²n̄,  P = γN²n̄,  2D_φ = Kλ²/(4P).
struct LinewidthResult {
    double intensity = 0.0;
    double power = 0.0;
    double phase_diffusion = 0.0;  // 2D_φ
};

LinewidthResult linewidth(const QuasiModeReport& report, double photon_number);

} // namespace petermann

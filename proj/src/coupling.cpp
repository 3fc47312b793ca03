#include "petermann/coupling.hpp"

#include "petermann/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace petermann {

namespace {

void check_psd(const Eigen::MatrixXd& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw numeric_error("coupling: symmetric eigensolver failed during PSD check");
    const double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < -1e-10 * scale)
        throw numeric_error("coupling: matrix not positive semi-definite (min eigenvalue " +
                            std::to_string(min_ev) + ")");
}

} // namespace

ReservoirProfile uniform_profile(const ModeBasis& basis, double strength, ReservoirKind kind) {
    ReservoirProfile p;
    p.indicator = Eigen::VectorXd::Ones(basis.grid.size());
    p.strength = strength;
    p.kind = kind;
    return p;
}

ReservoirProfile interval_profile(const ModeBasis& basis, double a, double b, double strength,
                                  ReservoirKind kind) {
    if (!(a < b)) throw config_error("profile: interval needs a < b");
    const auto& x = basis.grid.x;
    if (a < x[0] - 1e-12 || b > x[x.size() - 1] + 1e-12)
        throw config_error("profile: interval outside the universe");

    const double node_tol = 1e-9 * basis.grid.extent;
    ReservoirProfile p;
    p.indicator = Eigen::VectorXd::Zero(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const bool on_a = std::abs(x[i] - a) <= node_tol;
        const bool on_b = std::abs(x[i] - b) <= node_tol;
        if ((on_a && i == 0) || (on_b && i == x.size() - 1)) {
            p.indicator[i] = 1.0;  // step clipped by the domain edge
        } else if (on_a || on_b) {
            p.indicator[i] = 0.5;  // midpoint convention at an interior jump node
        } else if (x[i] > a && x[i] < b) {
            p.indicator[i] = 1.0;
        }
    }
    p.strength = strength;
    p.kind = kind;
    return p;
}

CouplingMatrix build_coupling(const ModeBasis& basis, const ReservoirProfile& profile) {
    if (profile.indicator.size() != basis.grid.size())
        throw config_error("coupling: profile not sampled on the basis grid");
    if ((profile.indicator.array() < 0.0).any())
        throw config_error("coupling: indicator must be non-negative");
    if (!(profile.strength >= 0.0) || !std::isfinite(profile.strength))
        throw config_error("coupling: strength must be finite and >= 0");

    const double measure = basis.grid.integrate(profile.indicator);  // V'
    if (!(measure > 0.0)) throw config_error("coupling: degenerate profile (zero measure)");

    const Eigen::Index n = basis.n_modes();
    CouplingMatrix out;
    out.kind = profile.kind;
    if (profile.strength == 0.0) {
        out.m = Eigen::MatrixXd::Zero(n, n);
        return out;
    }

    // m_ij = g ε_i ε_j (1/V') Σ_k w_k ind_k u_i(x_k) u_j(x_k)
    const Eigen::VectorXd wind = basis.grid.weights.cwiseProduct(profile.indicator);
    Eigen::MatrixXd overlap = basis.modes.transpose() * wind.asDiagonal() * basis.modes / measure;
    Eigen::MatrixXd m = profile.strength *
                        basis.eps.asDiagonal() * overlap * basis.eps.asDiagonal();
    out.m = 0.5 * (m + m.transpose());  // kill quadrature rounding asymmetry
    check_psd(out.m);
    return out;
}

double rate_on_vector(const CouplingMatrix& coupling, const Eigen::VectorXd& eps,
                      const Eigen::VectorXcd& c) {
    if (coupling.size() != eps.size() || coupling.size() != c.size())
        throw std::invalid_argument("rate_on_vector: dimension mismatch");
    const Eigen::VectorXcd v = eps.cast<std::complex<double>>().cwiseProduct(c);
    const double denom = v.squaredNorm();  // Σ ε²|c|²
    if (!(denom > 0.0)) throw numeric_error("rate_on_vector: zero vector");
    const Eigen::VectorXcd mv = coupling.m.cast<std::complex<double>>() * v;
    return v.dot(mv).real() / denom;
}

CouplingMatrix scale_to_rate(const CouplingMatrix& coupling, const Eigen::VectorXd& eps,
                             const Eigen::VectorXcd& c, double target_rate) {
    const double current = rate_on_vector(coupling, eps, c);
    if (current == 0.0)
        throw numeric_error("scale_to_rate: rate functional vanishes on this vector");
    CouplingMatrix out = coupling;
    out.m *= target_rate / current;
    return out;
}

} // namespace petermann

#include "petermann/quasimode.hpp"

#include "petermann/errors.hpp"

#include <cmath>
#include <sstream>

namespace petermann {

namespace {

void check_report_identities(const QuasiModeReport& r) {
    // Exact algebraic consequences of the definitions; a violation means a
    // bug, not bad input.
    std::ostringstream msg;
    if (r.K < 1.0 - 1e-10) {
        msg << "analyze: K = " << r.K << " < 1";
    } else if (r.K > r.K_tilde * (1.0 + 1e-10)) {
        msg << "analyze: K = " << r.K << " exceeds K_tilde = " << r.K_tilde;
    } else if (std::abs(r.ratio * r.K - r.K_tilde) > 1e-10 * r.K_tilde) {
        msg << "analyze: ratio*K != K_tilde (" << r.ratio * r.K << " vs " << r.K_tilde << ")";
    } else if (std::abs(r.p.sum() - 1.0) > 1e-12) {
        msg << "analyze: probabilities sum to " << r.p.sum();
    } else {
        return;
    }
    throw numeric_error(msg.str());
}

} // namespace

QuasiModeReport analyze_vector(const Eigen::VectorXcd& c, const ModeBasis& basis,
                               const CouplingMatrix& gain, const CouplingMatrix* loss) {
    const Eigen::Index n = basis.n_modes();
    if (c.size() != n) throw std::invalid_argument("analyze: vector does not match basis");
    if (gain.size() != n) throw std::invalid_argument("analyze: gain matrix does not match basis");
    if (loss && loss->size() != n)
        throw std::invalid_argument("analyze: loss matrix does not match basis");

    const Eigen::VectorXcd eps2 =
        basis.eps.array().square().cast<std::complex<double>>();
    const Eigen::VectorXd abs2 = c.cwiseAbs2();
    const Eigen::VectorXd eps2_abs2 = basis.eps.array().square() * abs2.array();

    QuasiModeReport r;
    r.c = c;
    r.eps = basis.eps;
    r.S = eps2.cwiseProduct(c).cwiseProduct(c).sum();
    r.sum_eps2_abs_c2 = eps2_abs2.sum();

    const double overlap_floor = kSelfOverlapFloor * r.sum_eps2_abs_c2;
    if (std::abs(r.S) <= overlap_floor)
        throw numeric_error("analyze: self-orthogonal quasi mode (|Σε²c²| = " +
                            std::to_string(std::abs(r.S)) + "); K diverges");

    r.p = eps2_abs2 / r.sum_eps2_abs_c2;
    r.Omega = r.p.dot(basis.omega);
    r.omega_spread = std::sqrt(r.p.dot((basis.omega.array() - r.Omega).square().matrix()));
    r.Omega_amplitude_weighted = abs2.dot(basis.omega) / abs2.sum();
    r.E_nu = std::sqrt(r.Omega);

    r.lambda = rate_on_vector(gain, basis.eps, c);
    r.gamma = loss ? rate_on_vector(*loss, basis.eps, c) : 0.0;

    const double S2 = std::norm(r.S);
    r.N2 = (basis.eps.array().pow(4) * abs2.array()).sum() / S2;
    r.N2_bar = abs2.sum();

    r.K = std::norm(r.sum_eps2_abs_c2 / r.S);  // |Σε²|c|² / Σε²c²|²
    r.K_tilde = r.N2 * r.N2_bar;
    r.ratio = r.Omega * (r.p.array() / basis.omega.array()).sum();

    // Sampled quasi-mode functions, Eqs.-(18)/(20) shape.
    r.U = basis.modes.cast<std::complex<double>>() * (eps2.cwiseProduct(c) / r.S);
    r.U_bar = basis.modes.cast<std::complex<double>>() * c;

    check_report_identities(r);
    return r;
}

QuasiModeReport analyze(const QuasiModeSet& set, Eigen::Index index, const ModeBasis& basis,
                        const CouplingMatrix& gain, const CouplingMatrix* loss) {
    if (index < 0 || index >= set.size())
        throw std::invalid_argument("analyze: mode index out of range");
    if (set.self_orthogonal[static_cast<std::size_t>(index)])
        throw numeric_error("analyze: mode " + std::to_string(index) +
                            " is flagged self-orthogonal; K diverges");
    QuasiModeReport r = analyze_vector(set.right_vectors.col(index), basis, gain, loss);
    r.index = index;
    r.eigenvalue = set.eigenvalues[index];
    return r;
}

double quasimode_orthogonality_residual(const std::vector<QuasiModeReport>& reports,
                                        const SpatialGrid& grid) {
    if (reports.empty()) throw std::invalid_argument("orthogonality: no reports");
    for (const auto& r : reports)
        if (r.U.size() != grid.size() || r.U_bar.size() != grid.size())
            throw std::invalid_argument("orthogonality: report sampled on a different grid");

    double residual = 0.0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (std::size_t j = 0; j < reports.size(); ++j) {
            const std::complex<double> val =
                grid.average(Eigen::VectorXcd(reports[i].U.cwiseProduct(reports[j].U_bar)));
            const double dev = (i == j) ? std::abs(val - 1.0) : std::abs(val);
            residual = std::max(residual, dev);
        }
    }
    return residual;
}

std::pair<double, double> norm_consistency(const QuasiModeReport& report,
                                           const SpatialGrid& grid) {
    const double n2_quad = grid.average(Eigen::VectorXd(report.U.cwiseAbs2()));
    const double n2bar_quad = grid.average(Eigen::VectorXd(report.U_bar.cwiseAbs2()));
    return {std::abs(n2_quad - report.N2) / report.N2,
            std::abs(n2bar_quad - report.N2_bar) / report.N2_bar};
}

} // namespace petermann

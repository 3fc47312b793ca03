#include "petermann/spectral.hpp"

#include "petermann/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace petermann {

namespace {

constexpr double kResidualBound = 1e-10;   // ‖Ac − μc‖ ≤ bound·‖A‖
constexpr double kLeftVerifyBound = 1e-9;  // ‖lᵀA − μlᵀ‖ ≤ bound·‖A‖ for unit l
constexpr double kDegeneracyTol = 1e-8;    // eigenvalue gap below tol·‖A‖

// Unit norm, largest-modulus entry real positive.
void fix_gauge(Eigen::VectorXcd& v) {
    v.normalize();
    Eigen::Index k = 0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best) {
            best = a;
            k = i;
        }
    }
    if (best > 0.0) v *= std::conj(v[k]) / best;
}

// A few rounds of inverse iteration on Aᵀ with a slightly displaced shift;
// used only when the ε²-scaling shortcut fails verification.
Eigen::VectorXcd left_by_inverse_iteration(const Eigen::MatrixXcd& a, std::complex<double> mu,
                                           const Eigen::VectorXcd& seed, double norm_a) {
    const Eigen::Index n = a.rows();
    const std::complex<double> shift = mu + std::complex<double>(0.0, 1e-12 * norm_a);
    Eigen::MatrixXcd shifted = a.transpose() - shift * Eigen::MatrixXcd::Identity(n, n);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(shifted);
    Eigen::VectorXcd l = seed.normalized();
    for (int iter = 0; iter < 8; ++iter) {
        l = lu.solve(l);
        const double nrm = l.norm();
        if (!(nrm > 0.0) || !std::isfinite(nrm)) throw numeric_error("left inverse iteration broke down");
        l /= nrm;
        if ((a.transpose() * l - mu * l).norm() <= 0.1 * kLeftVerifyBound * norm_a) break;
    }
    return l;
}

} // namespace

SystemMatrix assemble(const ModeBasis& basis, const CouplingMatrix& gain,
                      const CouplingMatrix* loss) {
    const Eigen::Index n = basis.n_modes();
    if (gain.size() != n) throw std::invalid_argument("assemble: gain matrix does not match basis");
    if (loss && loss->size() != n)
        throw std::invalid_argument("assemble: loss matrix does not match basis");

    SystemMatrix sys;
    sys.omega = basis.omega;
    sys.eps = basis.eps;
    sys.gain = gain.m;
    if (loss) sys.loss = loss->m;

    Eigen::MatrixXcd core = (0.5 * gain.m).cast<std::complex<double>>();
    if (loss) core -= (0.5 * loss->m).cast<std::complex<double>>();
    core -= std::complex<double>(0.0, 1.0) *
            Eigen::MatrixXcd(basis.omega.cast<std::complex<double>>().asDiagonal());
    // a_mn = core_mn · ε_n/ε_m; the diagonal ratio is exactly one, so it is
    // left untouched (keeps L = Γ cancellation bit-exact).
    sys.a = core;
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index nn = 0; nn < n; ++nn)
            if (m != nn) sys.a(m, nn) *= basis.eps[nn] / basis.eps[m];
    return sys;
}

QuasiModeSet eigendecompose(const Eigen::MatrixXcd& a, const Eigen::VectorXd& eps) {
    const Eigen::Index n = a.rows();
    if (n < 1 || a.cols() != n) throw std::invalid_argument("eigendecompose: need a square matrix");
    if (eps.size() != n) throw std::invalid_argument("eigendecompose: eps size mismatch");

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "eigendecompose: QR iteration did not converge for N=" << n
            << " (info=" << static_cast<int>(solver.info()) << ")";
        throw numeric_error(msg.str());
    }

    QuasiModeSet set;
    set.eps = eps;
    set.matrix_norm = a.norm();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const auto& raw_ev = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        if (raw_ev[i].real() != raw_ev[j].real()) return raw_ev[i].real() > raw_ev[j].real();
        return raw_ev[i].imag() > raw_ev[j].imag();
    });

    set.eigenvalues.resize(n);
    set.right_vectors.resize(n, n);
    set.left_vectors.resize(n, n);
    set.self_overlaps.resize(n);
    set.residuals.resize(n);
    set.self_orthogonal.assign(static_cast<std::size_t>(n), false);
    set.left_from_fallback.assign(static_cast<std::size_t>(n), false);

    const Eigen::VectorXcd eps2 = eps.array().square().cast<std::complex<double>>();
    for (Eigen::Index v = 0; v < n; ++v) {
        const Eigen::Index src = order[static_cast<std::size_t>(v)];
        const std::complex<double> mu = raw_ev[src];
        Eigen::VectorXcd c = solver.eigenvectors().col(src);
        fix_gauge(c);

        const double residual = (a * c - mu * c).norm();
        if (residual > kResidualBound * set.matrix_norm) {
            std::ostringstream msg;
            msg << "eigendecompose: eigenpair " << v << " residual " << residual
                << " exceeds bound " << kResidualBound * set.matrix_norm;
            throw numeric_error(msg.str());
        }

        // S_ν = Σ ε² c² (unconjugated); flag near-self-orthogonal modes.
        const std::complex<double> overlap = eps2.cwiseProduct(c).cwiseProduct(c).sum();
        const double weight = eps.cwiseProduct(c.cwiseAbs()).squaredNorm();
        const bool flagged = std::abs(overlap) <= kSelfOverlapFloor * weight;

        Eigen::VectorXcd left = eps2.cwiseProduct(c).normalized();
        const double left_residual = (a.transpose() * left - mu * left).norm();
        if (left_residual > kLeftVerifyBound * set.matrix_norm) {
            left = left_by_inverse_iteration(a, mu, left, set.matrix_norm);
            set.left_from_fallback[static_cast<std::size_t>(v)] = true;
        }

        set.eigenvalues[v] = mu;
        set.right_vectors.col(v) = c;
        set.left_vectors.col(v) = left;
        set.self_overlaps[v] = overlap;
        set.residuals[v] = residual;
        set.self_orthogonal[static_cast<std::size_t>(v)] = flagged;
    }
    return set;
}

QuasiModeSet eigendecompose(const SystemMatrix& sys) { return eigendecompose(sys.a, sys.eps); }

BiorthogonalityCheck biorthogonality_residual(const QuasiModeSet& set) {
    const Eigen::Index n = set.size();
    BiorthogonalityCheck check;
    const Eigen::VectorXcd eps2 = set.eps.array().square().cast<std::complex<double>>();
    for (Eigen::Index v = 0; v < n; ++v) {
        for (Eigen::Index u = v + 1; u < n; ++u) {
            const std::complex<double> cross = eps2.cwiseProduct(set.right_vectors.col(v))
                                                   .cwiseProduct(set.right_vectors.col(u))
                                                   .sum();
            const double scale =
                std::sqrt(std::abs(set.self_overlaps[v]) * std::abs(set.self_overlaps[u]));
            if (scale > 0.0) check.residual = std::max(check.residual, std::abs(cross) / scale);
            if (std::abs(set.eigenvalues[v] - set.eigenvalues[u]) <
                kDegeneracyTol * set.matrix_norm) {
                check.degenerate = true;
                check.close_pairs.emplace_back(v, u);
            }
        }
    }
    return check;
}

double completeness_residual(const QuasiModeSet& set) {
    const Eigen::Index n = set.size();
    for (Eigen::Index v = 0; v < n; ++v)
        if (set.self_orthogonal[static_cast<std::size_t>(v)])
            throw numeric_error(
                "completeness_residual: self-orthogonal mode " + std::to_string(v) +
                " present; the completeness sum is undefined");

    const Eigen::VectorXcd eps2 = set.eps.array().square().cast<std::complex<double>>();
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index v = 0; v < n; ++v) {
        const Eigen::VectorXcd& c = set.right_vectors.col(v);
        sum += eps2.cwiseProduct(c) * c.transpose() / set.self_overlaps[v];
    }
    sum -= Eigen::MatrixXcd::Identity(n, n);
    return sum.cwiseAbs().maxCoeff();
}

Eigen::Index select_dominant(const QuasiModeSet& set, std::optional<double> target_frequency) {
    const Eigen::Index n = set.size();
    double best_re = -std::numeric_limits<double>::infinity();
    for (Eigen::Index v = 0; v < n; ++v) {
        if (set.self_orthogonal[static_cast<std::size_t>(v)]) continue;
        best_re = std::max(best_re, set.eigenvalues[v].real());
    }
    if (!std::isfinite(best_re))
        throw numeric_error("select_dominant: every mode is flagged self-orthogonal");

    const double tie_tol = 1e-12 * std::max(set.matrix_norm, 1.0);
    Eigen::Index best = -1;
    double best_detune = std::numeric_limits<double>::infinity();
    for (Eigen::Index v = 0; v < n; ++v) {
        if (set.self_orthogonal[static_cast<std::size_t>(v)]) continue;
        if (set.eigenvalues[v].real() < best_re - tie_tol) continue;
        if (!target_frequency) return v;  // eigenvalues are sorted: first tie wins
        const double detune = std::abs(set.eigenvalues[v].imag() + *target_frequency);
        if (detune < best_detune) {
            best_detune = detune;
            best = v;
        }
    }
    return best;
}

} // namespace petermann

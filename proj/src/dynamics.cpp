#include "petermann/dynamics.hpp"

#include "petermann/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace petermann {

namespace {

using Cplx = std::complex<double>;

struct Derivative {
    Eigen::VectorXcd mean;
    Eigen::MatrixXcd normal;
    Eigen::MatrixXcd anomalous;
};

Derivative rhs(const MomentGenerator& gen, const MomentState& s) {
    Derivative d;
    d.mean = gen.drift * s.mean;
    d.normal = gen.drift.conjugate() * s.normal + s.normal * gen.drift +
               gen.source.cast<Cplx>();
    d.anomalous = gen.drift * s.anomalous + s.anomalous * gen.drift;
    return d;
}

MomentState advanced(const MomentState& s, const Derivative& d, double h) {
    MomentState out;
    out.t = s.t + h;
    out.mean = s.mean + h * d.mean;
    out.normal = s.normal + h * d.normal;
    out.anomalous = s.anomalous + h * d.anomalous;
    return out;
}

} // namespace

namespace detail {

void rk4_step(MomentState& s, const MomentGenerator& gen, double h) {
    const Derivative k1 = rhs(gen, s);
    const Derivative k2 = rhs(gen, advanced(s, k1, 0.5 * h));
    const Derivative k3 = rhs(gen, advanced(s, k2, 0.5 * h));
    const Derivative k4 = rhs(gen, advanced(s, k3, h));
    s.mean += (h / 6.0) * (k1.mean + 2.0 * k2.mean + 2.0 * k3.mean + k4.mean);
    s.normal += (h / 6.0) * (k1.normal + 2.0 * k2.normal + 2.0 * k3.normal + k4.normal);
    s.anomalous +=
        (h / 6.0) * (k1.anomalous + 2.0 * k2.anomalous + 2.0 * k3.anomalous + k4.anomalous);
    s.t += h;
}

} // namespace detail

namespace {

using detail::rk4_step;

void check_state_physical(const MomentState& s) {
    if ((s.normal - s.normal.adjoint().eval()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, s.normal.cwiseAbs().maxCoeff()))
        throw numeric_error("moment state: normal moments lost Hermiticity");
    if ((s.anomalous - s.anomalous.transpose().eval()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, s.anomalous.cwiseAbs().maxCoeff()))
        throw numeric_error("moment state: anomalous moments lost symmetry");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.normal, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, s.normal.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
        throw numeric_error("moment state: normal moments not positive semi-definite");
}

// Least-squares slope of y(t) over the samples [first, last).
double fit_slope(const Eigen::VectorXd& t, const Eigen::VectorXd& y, Eigen::Index first) {
    const Eigen::Index n = t.size() - first;
    const auto ts = t.segment(first, n);
    const auto ys = y.segment(first, n);
    const double tm = ts.mean();
    const double ym = ys.mean();
    const double sxx = (ts.array() - tm).square().sum();
    return (ts.array() - tm).matrix().dot((ys.array() - ym).matrix()) / sxx;
}

} // namespace

double MomentGenerator::max_rate() const {
    if (drift.size() == 0) return 0.0;
    return drift.cwiseAbs().rowwise().sum().maxCoeff();
}

MomentGenerator derive_moment_generator(const CouplingMatrix& gain, const CouplingMatrix* loss,
                                        const Eigen::VectorXd& omega, double frame_frequency) {
    const Eigen::Index n = omega.size();
    if (gain.size() != n) throw std::invalid_argument("moment generator: gain size mismatch");
    if (loss && loss->size() != n)
        throw std::invalid_argument("moment generator: loss size mismatch");

    MomentGenerator gen;
    gen.omega = omega;
    gen.frame_frequency = frame_frequency;
    gen.gain = gain.m;
    gen.source = gain.m;
    if (loss) gen.loss = loss->m;

    Eigen::MatrixXd real_part = 0.5 * gain.m;
    if (loss) real_part -= 0.5 * loss->m;
    gen.drift = real_part.cast<Cplx>();
    gen.drift -= Cplx(0.0, 1.0) * Eigen::MatrixXcd(
                     (omega.array() - frame_frequency).matrix().cast<Cplx>().asDiagonal());
    return gen;
}

double suggested_dt(const MomentGenerator& gen) {
    const double rate = gen.max_rate();
    return rate > 0.0 ? kStepBudget / rate : std::numeric_limits<double>::infinity();
}

MomentState vacuum_state(Eigen::Index n_modes) {
    MomentState s;
    s.mean = Eigen::VectorXcd::Zero(n_modes);
    s.normal = Eigen::MatrixXcd::Zero(n_modes, n_modes);
    s.anomalous = Eigen::MatrixXcd::Zero(n_modes, n_modes);
    return s;
}

MomentState evolve(const MomentState& state, const MomentGenerator& gen, double t_final,
                   double dt) {
    if (state.mean.size() != gen.size())
        throw std::invalid_argument("evolve: state does not match generator");
    if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
    if (t_final < state.t) throw std::invalid_argument("evolve: t_final before state time");

    const double rate = gen.max_rate();
    if (dt * rate > kStepBudget * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "evolve: dt = " << dt << " violates dt*max_rate <= " << kStepBudget
            << "; use dt <= " << kStepBudget / rate;
        throw numeric_error(msg.str());
    }

    MomentState s = state;
    const double span = t_final - state.t;
    const auto full_steps = static_cast<long long>(std::floor(span / dt + 1e-12));
    for (long long i = 0; i < full_steps; ++i) rk4_step(s, gen, dt);
    const double rest = t_final - s.t;
    if (rest > 1e-12 * std::max(dt, 1.0)) rk4_step(s, gen, rest);
    s.t = t_final;
    return s;
}

QuadratureProbe make_probe(const QuasiModeReport& report, std::optional<Eigen::Index> position) {
    QuadratureProbe p;
    p.report = &report;
    p.position = position;
    p.rotating_frequency = report.Omega;
    return p;
}

double quadrature_variance(const MomentState& state, const QuadratureProbe& probe,
                           double state_frame) {
    if (!probe.report) throw std::invalid_argument("quadrature_variance: probe has no report");
    const QuasiModeReport& r = *probe.report;
    if (state.mean.size() != r.c.size())
        throw std::invalid_argument("quadrature_variance: state does not match report");
    if (probe.position && (*probe.position < 0 || *probe.position >= r.U.size()))
        throw std::invalid_argument("quadrature_variance: probe position outside the grid");

    // Quasi-mode weights 𝓔·Â = Σ ε_n c_n â_n, carried into the frame the
    // state is expressed in.
    const Cplx phase = std::exp(Cplx(0.0, (probe.rotating_frequency - state_frame) * state.t));
    const Eigen::VectorXcd w = phase * r.eps.cast<Cplx>().cwiseProduct(r.c);

    const Cplx mean_b = (w.transpose() * state.mean).value();
    const Cplx anom = (w.transpose() * state.anomalous * w).value() - mean_b * mean_b;
    const double norm = ((w.adjoint() * state.normal * w).value() - std::norm(mean_b)).real();
    const double vacuum = w.squaredNorm();  // Σ ε²|c|²

    Cplx u2;     // spatial weight of the ⟨δB²⟩ term
    double au2;  // spatial weight of the |·|² terms
    if (probe.position) {
        const Cplx u = r.U[*probe.position];
        u2 = u * u;
        au2 = std::norm(u);
    } else {
        // position averages: (1/V)∫U² = Σ ε⁴c²/S², (1/V)∫|U|² = N²
        const Eigen::VectorXcd coef =
            r.eps.array().square().cast<Cplx>().cwiseProduct(r.c.array()).matrix() / r.S;
        u2 = coef.cwiseProduct(coef).sum();
        au2 = r.N2;
    }
    return 2.0 * (u2 * anom).real() + au2 * (2.0 * norm + vacuum);
}

NoiseTrace verify_noise_law(const QuasiModeReport& report, const MomentGenerator& gen,
                            double horizon, const std::vector<Eigen::Index>& probe_positions) {
    if (gen.loss) throw numeric_error("noise law: applies to gain-only systems");
    if (!(report.lambda > 0.0))
        throw numeric_error("noise law: not applicable, amplification rate is not positive");

    const double lambda = report.lambda;
    if (horizon <= 0.0) horizon = 3.0 / lambda;
    const double dt = std::min(suggested_dt(gen), horizon / 16.0);
    const Eigen::Index samples = 256;

    std::vector<QuadratureProbe> probes;
    probes.push_back(make_probe(report));
    for (Eigen::Index pos : probe_positions) probes.push_back(make_probe(report, pos));

    const double e2k = report.Omega * report.K;  // 𝓔²K
    NoiseTrace trace;
    trace.times.resize(samples + 1);
    trace.variance.resize(samples + 1);

    MomentState s = vacuum_state(report.c.size());
    for (Eigen::Index k = 0; k <= samples; ++k) {
        const double t = horizon * static_cast<double>(k) / static_cast<double>(samples);
        if (k > 0) s = evolve(s, gen, t, dt);
        check_state_physical(s);
        trace.times[k] = t;
        trace.variance[k] = quadrature_variance(s, probes.front(), gen.frame_frequency);

        const double growth = 2.0 * std::exp(lambda * t) - 1.0;
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            const auto& probe = probes[pi];
            const double measured =
                pi == 0 ? trace.variance[k] : quadrature_variance(s, probe, gen.frame_frequency);
            const double expected =
                probe.position
                    ? std::norm(report.U[*probe.position]) * report.sum_eps2_abs_c2 * growth
                    : e2k * growth;
            trace.max_rel_deviation = std::max(
                trace.max_rel_deviation, std::abs(measured - expected) / std::abs(expected));
        }
    }
    trace.passed = trace.max_rel_deviation < 1e-6;
    trace.note = trace.passed ? "matches (dX)^2 = E^2 K (2 e^{lt} - 1)" : "deviates from gain-only noise law";
    return trace;
}

NoiseTrace verify_threshold_diffusion(const QuasiModeReport& report, const MomentGenerator& gen,
                                      double horizon) {
    const double lambda = report.lambda;
    const double gamma = report.gamma;
    const bool both_zero = lambda == 0.0 && gamma == 0.0;
    if (!both_zero && std::abs(gamma - lambda) > 1e-10 * std::abs(lambda))
        throw numeric_error("threshold diffusion: system is not at threshold (gamma != lambda)");

    if (horizon <= 0.0) horizon = both_zero ? 1.0 : 5.0 / lambda;
    const double dt = std::min(suggested_dt(gen), horizon / 16.0);
    const Eigen::Index samples = 256;

    const QuadratureProbe probe = make_probe(report);
    const double expected = 2.0 * lambda * report.Omega * report.K;  // 2λ𝓔²K

    NoiseTrace trace;
    trace.times.resize(samples + 1);
    trace.variance.resize(samples + 1);
    MomentState s = vacuum_state(report.c.size());
    for (Eigen::Index k = 0; k <= samples; ++k) {
        const double t = horizon * static_cast<double>(k) / static_cast<double>(samples);
        if (k > 0) s = evolve(s, gen, t, dt);
        check_state_physical(s);
        trace.times[k] = t;
        trace.variance[k] = quadrature_variance(s, probe, gen.frame_frequency);
    }

    // Fit over the second half only; guards against integrator startup.
    trace.slope_fit = fit_slope(trace.times, trace.variance, (samples + 1) / 2);
    const double floor = 1e-10 * report.Omega * report.K / horizon;
    trace.max_rel_deviation =
        std::abs(trace.slope_fit - expected) / std::max(std::abs(expected), floor);
    trace.passed = trace.max_rel_deviation < 1e-4;
    trace.note = trace.passed ? "variance slope matches 2 lambda E^2 K"
                              : "variance slope deviates from 2 lambda E^2 K";
    return trace;
}

LinewidthResult linewidth(const QuasiModeReport& report, double photon_number) {
    if (!(photon_number > 0.0))
        throw numeric_error("linewidth: photon number must be positive");
    const double lambda = report.lambda;
    const double gamma = report.gamma;
    if (std::abs(gamma - lambda) > 1e-6 * std::max(std::abs(lambda), std::abs(gamma)))
        throw numeric_error("linewidth: defined at threshold (gamma = lambda)");
    if (!(gamma > 0.0)) throw numeric_error("linewidth: zero output power");

    LinewidthResult out;
    const double e2 = report.Omega;  // 𝓔²
    out.intensity = 4.0 * e2 * report.N2 * photon_number;
    out.power = gamma * report.N2 * photon_number;
    out.phase_diffusion = report.K * lambda * lambda / (4.0 * out.power);
    return out;
}

} // namespace petermann

#pragma once

#include "jch/protocol.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

// Measurement-side math: populations, excitation-number variance estimators
// and bounds, instantaneous spectra, diabatic leakage, collective-mode
// occupations and sideband spectroscopy synthesis/fitting.

namespace jch {

inline double expectation(const StateVector& state, const Operator& op) {
    if (!(*state.basis == *op.basis))
        throw std::invalid_argument("expectation: basis mismatch");
    return std::real(state.amplitudes.dot(op.matrix * state.amplitudes));
}

/// <op^2> - <op>^2, clamped at 0 against roundoff.
inline double variance(const StateVector& state, const Operator& op) {
    if (!(*state.basis == *op.basis))
        throw std::invalid_argument("variance: basis mismatch");
    const Vector op_psi = op.matrix * state.amplitudes;
    const double mean = std::real(state.amplitudes.dot(op_psi));
    const double second = std::real(op_psi.dot(op_psi));
    return std::max(0.0, second - mean * mean);
}

inline double covariance(const StateVector& state, const Operator& a,
                         const Operator& b) {
    const Vector a_psi = a.matrix * state.amplitudes;
    const Vector b_psi = b.matrix * state.amplitudes;
    return std::real(a_psi.dot(b_psi)) -
           expectation(state, a) * expectation(state, b);
}

/// Local phonon variance from rocking-mode moments, valid when the COM mode
/// is (nearly) empty: Delta N_p1^2 ~ <N_pr>/4 + Delta N_pr^2 / 4.
inline double phonon_variance_rocking_approx(double mean_r, double var_r) {
    if (mean_r < 0.0 || var_r < 0.0)
        throw std::invalid_argument("phonon_variance_rocking_approx: negative input");
    return 0.25 * mean_r + 0.25 * var_r;
}

/// Rocking-mode variance from atomic statistics, valid for fixed total N and
/// empty COM mode: Delta N_pr^2 = var_a1 + var_a2 + 2 Cov(N_a1, N_a2).
/// Negative results (input noise) clamp to 0 and set *clamped.
inline double rocking_variance_from_atomic(double var_a1, double var_a2,
                                           double cov_a12,
                                           bool* clamped = nullptr) {
    const double v = var_a1 + var_a2 + 2.0 * cov_a12;
    if (clamped) *clamped = v < 0.0;
    return std::max(0.0, v);
}

/// Bound interval for the total excitation variance Delta N_1^2:
///   lower = var_a + var_p - 2 mean_a mean_p      (positivity of N_a N_p)
///   upper = var_a + var_p + 2 sqrt(var_a var_p)  (Cauchy-Schwarz)
/// The lower bound is reported raw; it may be negative.
inline std::pair<double, double> total_variance_bounds(double mean_a, double mean_p,
                                                       double var_a, double var_p) {
    if (mean_a < 0.0 || mean_p < 0.0 || var_a < 0.0 || var_p < 0.0)
        throw std::invalid_argument("total_variance_bounds: negative input");
    const double lower = var_a + var_p - 2.0 * mean_a * mean_p;
    const double upper = var_a + var_p + 2.0 * std::sqrt(var_a * var_p);
    return {lower, upper};
}

/// Per-site excitation statistics: exact operator moments plus the estimator
/// bound interval computed from the same moments.
struct VarianceReport {
    int site = 1;
    double mean_a = 0.0, mean_p = 0.0;
    double var_a = 0.0, var_p = 0.0;
    double var_total_exact = 0.0;
    double cov_ap = 0.0;
    double bound_lower = 0.0, bound_upper = 0.0;
    bool clamped = false;  // set when a negative estimate was clamped to 0
};

inline VarianceReport variance_report(const StateVector& state, int site) {
    const auto [n_tot, n_a, n_p] = number_operators(*state.basis, site);
    VarianceReport r;
    r.site = site;
    r.mean_a = expectation(state, n_a);
    r.mean_p = expectation(state, n_p);
    r.var_a = variance(state, n_a);
    r.var_p = variance(state, n_p);
    r.var_total_exact = variance(state, n_tot);
    r.cov_ap = covariance(state, n_a, n_p);
    std::tie(r.bound_lower, r.bound_upper) =
        total_variance_bounds(r.mean_a, r.mean_p, r.var_a, r.var_p);
    return r;
}

/// Instantaneous eigenvalues and eigenvectors of H(t) on the N = 2 JC sector,
/// sorted ascending, with the ground vector phase-aligned along the track.
struct EigenTrack {
    Basis basis;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> eigenvalues;   // [time] -> sorted spectrum
    std::vector<Matrix> eigenvectors;           // [time] -> columns per level
};

inline EigenTrack instantaneous_spectrum(const Schedule& schedule,
                                         const std::vector<double>& times,
                                         int n_max = 5, int sector = 2) {
    schedule.validate();
    for (double t : times)
        if (t < 0.0 || t > schedule.duration)
            throw std::invalid_argument("instantaneous_spectrum: time outside pulse");
    TruncationConfig cfg;
    cfg.n_max = n_max;
    cfg.sector = sector;
    cfg.kind = schedule.kind;
    EigenTrack track{build_basis(cfg), times, {}, {}};
    const Basis& basis = track.basis;
    for (double t : times) {
        const Matrix h = hamiltonian(schedule.params_at(t), basis).matrix;
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
        Eigen::VectorXd vals = solver.eigenvalues();
        Matrix vecs = solver.eigenvectors();
        if (!track.eigenvectors.empty()) {
            // phase-align each level with the previous time step
            const Matrix& prev = track.eigenvectors.back();
            for (int k = 0; k < vecs.cols(); ++k) {
                const Complex ov = prev.col(k).dot(vecs.col(k));
                if (std::abs(ov) > 0.0) vecs.col(k) *= std::conj(ov) / std::abs(ov);
            }
        }
        track.eigenvalues.push_back(std::move(vals));
        track.eigenvectors.push_back(std::move(vecs));
    }
    return track;
}

/// Leakage out of the instantaneous ground state along a trajectory, with the
/// per-level projections identifying the dominant leak channel.
struct LeakageSeries {
    std::vector<double> times;
    std::vector<double> leakage;                       // 1 - |<ground|psi>|^2
    std::vector<std::vector<double>> level_weights;    // [time][level]
    double max_leakage = 0.0;
    int dominant_channel = -1;  // excited level index (0 = ground) at max leakage
};

inline LeakageSeries ground_state_leakage(const Trajectory& traj,
                                          const EigenTrack& track) {
    if (traj.states.size() != track.times.size())
        throw std::invalid_argument("ground_state_leakage: time grids differ");
    const Basis& sector_basis = track.basis;
    const Basis& state_basis = *traj.states.front().basis;
    // sector basis states may live inside a larger state basis
    std::vector<int> embed(sector_basis.size());
    for (int i = 0; i < sector_basis.size(); ++i) {
        embed[i] = state_basis.index_of(sector_basis.state(i));
        if (embed[i] < 0)
            throw std::invalid_argument(
                "ground_state_leakage: trajectory basis does not contain sector");
    }
    LeakageSeries out;
    out.times = traj.times;
    for (size_t ti = 0; ti < traj.states.size(); ++ti) {
        const Vector& psi = traj.states[ti].amplitudes;
        Vector psi_sector(sector_basis.size());
        for (int i = 0; i < sector_basis.size(); ++i) psi_sector[i] = psi[embed[i]];
        const Matrix& vecs = track.eigenvectors[ti];
        std::vector<double> weights(vecs.cols());
        for (int k = 0; k < vecs.cols(); ++k)
            weights[k] = std::norm(vecs.col(k).dot(psi_sector));
        const double leak = 1.0 - weights[0];
        if (leak > out.max_leakage) {
            out.max_leakage = leak;
            out.dominant_channel = static_cast<int>(
                std::max_element(weights.begin() + 1, weights.end()) -
                weights.begin());
        }
        out.leakage.push_back(leak);
        out.level_weights.push_back(std::move(weights));
    }
    return out;
}

/// First-order adiabatic-theory estimate of diabatic transition
/// probabilities out of the instantaneous ground state:
/// P_k(t) = |<k(t)| dH/dt |0(t)>|^2 / (E_k - E_0)^4. This is the standard
/// analytic adiabaticity diagnostic; unlike the exact trajectory leakage it
/// does not include the transient interference envelope.
struct DiabaticEstimate {
    std::vector<double> times;
    std::vector<double> total;          // sum over excited levels at each time
    std::vector<double> level_max;      // [level] max over time, level 0 = 0
    double max_total = 0.0;
    int dominant_channel = -1;          // argmax over excited levels of level_max
};

inline DiabaticEstimate diabatic_transition_estimate(
    const Schedule& schedule, const std::vector<double>& times, int n_max = 5,
    int sector = 2) {
    schedule.validate();
    TruncationConfig cfg;
    cfg.n_max = n_max;
    cfg.sector = sector;
    cfg.kind = schedule.kind;
    const Basis basis = build_basis(cfg);
    const int dim = basis.size();

    DiabaticEstimate out;
    out.times = times;
    out.level_max.assign(dim, 0.0);
    const double dt = 1e-9 * schedule.duration;
    for (double t : times) {
        if (t < 0.0 || t > schedule.duration)
            throw std::invalid_argument(
                "diabatic_transition_estimate: time outside pulse");
        const double lo = std::max(0.0, t - dt);
        const double hi = std::min(schedule.duration, t + dt);
        const Matrix h = hamiltonian(schedule.params_at(t), basis).matrix;
        const Matrix dh = (hamiltonian(schedule.params_at(hi), basis).matrix -
                           hamiltonian(schedule.params_at(lo), basis).matrix) /
                          (hi - lo);
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
        const Eigen::VectorXd& vals = solver.eigenvalues();
        const Matrix& vecs = solver.eigenvectors();
        double total = 0.0;
        for (int k = 1; k < dim; ++k) {
            const double gap = vals[k] - vals[0];
            const Complex elem = vecs.col(k).dot(dh * vecs.col(0));
            const double p = std::norm(elem) / (gap * gap * gap * gap);
            total += p;
            out.level_max[k] = std::max(out.level_max[k], p);
        }
        out.total.push_back(total);
        out.max_total = std::max(out.max_total, total);
    }
    out.dominant_channel = static_cast<int>(
        std::max_element(out.level_max.begin() + 1, out.level_max.end()) -
        out.level_max.begin());
    return out;
}

/// (<a_c^dag a_c>, <a_r^dag a_r>).
inline std::pair<double, double> collective_occupations(const StateVector& state) {
    const auto [a_c, a_r] = collective_mode_ops(*state.basis);
    const Vector c_psi = a_c.matrix * state.amplitudes;
    const Vector r_psi = a_r.matrix * state.amplitudes;
    return {c_psi.squaredNorm(), r_psi.squaredNorm()};
}

// ---------------------------------------------------------------------------
// Sideband spectroscopy
// ---------------------------------------------------------------------------

enum class SidebandSide { Red, Blue };

/// Probe settings for synthetic sideband spectra. The two sideband resonances
/// sit at +-omega_com and +-omega_rock relative to the carrier.
struct SpectroscopyProbe {
    double rabi = khz_to_rad(2.0);       // on-resonance sideband Rabi (rad/s)
    double pulse = 50e-6;                // s
    double linewidth = khz_to_rad(8.0);  // Gaussian profile width (rad/s)
    double omega_com = mhz_to_rad(2.1);
    double omega_rock = mhz_to_rad(2.1) - khz_to_rad(12.0);
    int n_points = 400;
    double margin = 5.0;                 // grid extends this many linewidths out
};

struct SpectrumData {
    std::vector<double> detuning;     // rad/s relative to carrier
    std::vector<double> population;   // excitation probability in [0,1]
};

namespace detail {

/// Thermal-average sideband excitation for mean phonon number nbar:
/// sum_n p_n sin^2(rabi_n * t / 2), rabi_n = rabi*sqrt(n) (red) or
/// rabi*sqrt(n+1) (blue).
inline double sideband_peak_population(double nbar, double rabi, double pulse,
                                       SidebandSide side) {
    if (nbar < 0.0) throw std::invalid_argument("sideband: nbar must be >= 0");
    double total = 0.0;
    double p_n = 1.0 / (nbar + 1.0);
    const double q = nbar / (nbar + 1.0);
    for (int n = 0; n < 400 && p_n > 1e-14; ++n, p_n *= q) {
        const double quanta = (side == SidebandSide::Red) ? double(n) : double(n + 1);
        const double s = std::sin(0.5 * rabi * std::sqrt(quanta) * pulse);
        total += p_n * s * s;
    }
    return total;
}

}  // namespace detail

/// Synthetic two-mode sideband spectrum for thermal occupations
/// (nbar_com, nbar_rock): Gaussian peaks at the mode resonances whose heights
/// are the thermal sideband excitation probabilities.
inline SpectrumData sideband_spectrum(double nbar_com, double nbar_rock,
                                      const SpectroscopyProbe& probe,
                                      SidebandSide side) {
    const double sign = (side == SidebandSide::Red) ? -1.0 : 1.0;
    const double c1 = sign * probe.omega_rock;
    const double c2 = sign * probe.omega_com;
    const double h_com = detail::sideband_peak_population(nbar_com, probe.rabi,
                                                          probe.pulse, side);
    const double h_rock = detail::sideband_peak_population(nbar_rock, probe.rabi,
                                                           probe.pulse, side);
    const double lo = std::min(c1, c2) - probe.margin * probe.linewidth;
    const double hi = std::max(c1, c2) + probe.margin * probe.linewidth;
    SpectrumData data;
    data.detuning.resize(probe.n_points);
    data.population.resize(probe.n_points);
    for (int i = 0; i < probe.n_points; ++i) {
        const double d = lo + (hi - lo) * i / (probe.n_points - 1);
        const double u1 = (d - sign * probe.omega_com) / probe.linewidth;
        const double u2 = (d - sign * probe.omega_rock) / probe.linewidth;
        const double p = h_com * std::exp(-0.5 * u1 * u1) +
                         h_rock * std::exp(-0.5 * u2 * u2);
        data.detuning[i] = d;
        data.population[i] = std::clamp(p, 0.0, 1.0);
    }
    return data;
}

struct GaussianPeak {
    double center = 0.0;  // rad/s
    double height = 0.0;
    double width = 0.0;   // Gaussian sigma (rad/s)
};

struct SpectrumFit {
    std::vector<GaussianPeak> peaks;
    double residual_rms = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Multi-Gaussian least squares via Levenberg-Marquardt with analytic
/// Jacobian. Deterministic for fixed initial guesses; non-convergence is
/// reported through the flag, never thrown.
inline SpectrumFit fit_sideband_spectrum(const SpectrumData& data,
                                         const std::vector<GaussianPeak>& init,
                                         int max_iterations = 200) {
    const int n_pts = static_cast<int>(data.detuning.size());
    const int n_peaks = static_cast<int>(init.size());
    if (n_peaks < 1) throw std::invalid_argument("fit: need at least one peak");
    if (n_pts < 3 * n_peaks)
        throw std::invalid_argument("fit: fewer data points than parameters");
    for (double v : data.population)
        if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite data");

    Eigen::VectorXd p(3 * n_peaks);
    for (int k = 0; k < n_peaks; ++k) {
        p[3 * k] = init[k].center;
        p[3 * k + 1] = init[k].height;
        p[3 * k + 2] = std::abs(init[k].width);
    }

    // Heights enter the model linearly, so replace the caller's guesses with
    // the least-squares heights at the initial centers/widths. This keeps the
    // fit stable even when peaks overlap and the height guess is far off.
    {
        Eigen::MatrixXd e(n_pts, n_peaks);
        for (int i = 0; i < n_pts; ++i)
            for (int k = 0; k < n_peaks; ++k) {
                const double u = (data.detuning[i] - p[3 * k]) / p[3 * k + 2];
                e(i, k) = std::exp(-0.5 * u * u);
            }
        Eigen::VectorXd y(n_pts);
        for (int i = 0; i < n_pts; ++i) y[i] = data.population[i];
        const Eigen::VectorXd h = e.colPivHouseholderQr().solve(y);
        const double y_max = y.cwiseAbs().maxCoeff();
        for (int k = 0; k < n_peaks; ++k)
            if (std::isfinite(h[k]))
                p[3 * k + 1] = std::clamp(h[k], 1e-3 * y_max, 2.0 * y_max);
    }

    const auto residuals = [&](const Eigen::VectorXd& par, Eigen::VectorXd& r,
                               Eigen::MatrixXd* jac) {
        if (jac) jac->setZero(n_pts, 3 * n_peaks);
        for (int i = 0; i < n_pts; ++i) {
            double model = 0.0;
            for (int k = 0; k < n_peaks; ++k) {
                const double c = par[3 * k], h = par[3 * k + 1], w = par[3 * k + 2];
                const double u = (data.detuning[i] - c) / w;
                const double e = std::exp(-0.5 * u * u);
                model += h * e;
                if (jac) {
                    (*jac)(i, 3 * k) = h * e * u / w;
                    (*jac)(i, 3 * k + 1) = e;
                    (*jac)(i, 3 * k + 2) = h * e * u * u / w;
                }
            }
            r[i] = model - data.population[i];
        }
    };

    Eigen::VectorXd r(n_pts), r_try(n_pts);
    Eigen::MatrixXd jac(n_pts, 3 * n_peaks);
    residuals(p, r, &jac);
    double cost = r.squaredNorm();
    double lambda = 1e-3;

    SpectrumFit fit;
    for (int it = 0; it < max_iterations; ++it) {
        fit.iterations = it + 1;
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;
        Eigen::MatrixXd a = jtj;
        a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
        const Eigen::VectorXd step = a.ldlt().solve(jtr);
        const Eigen::VectorXd p_try = p - step;
        residuals(p_try, r_try, nullptr);
        const double cost_try = r_try.squaredNorm();
        if (cost_try < cost) {
            const double improvement = (cost - cost_try) / std::max(cost, 1e-300);
            p = p_try;
            cost = cost_try;
            lambda = std::max(1e-12, lambda * 0.3);
            residuals(p, r, &jac);
            if (improvement < 1e-12 || step.norm() < 1e-14) {
                fit.converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    if (!fit.converged && cost < 1e-20) fit.converged = true;

    for (int k = 0; k < n_peaks; ++k)
        fit.peaks.push_back({p[3 * k], p[3 * k + 1], std::abs(p[3 * k + 2])});
    fit.residual_rms = std::sqrt(cost / n_pts);
    return fit;
}

/// Sideband thermometry: nbar = r / (1 - r) with r = p_red / p_blue.
inline double nbar_from_ratio(double p_red, double p_blue) {
    if (!(p_red >= 0.0 && p_blue > p_red))
        throw std::invalid_argument("nbar_from_ratio: need 0 <= p_red < p_blue");
    const double r = p_red / p_blue;
    return r / (1.0 - r);
}

}  // namespace jch

#pragma once

#include "jch/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

// Time evolution under piecewise-defined time-dependent Hamiltonians with an
// optional quasi-static laser-frequency-noise model averaged over Monte Carlo
// trajectories.

namespace jch {

/// Time-dependent pulse parameters. `grid` holds the output sample times;
/// the integrator chooses its own substeps.
struct Schedule {
    double duration = 0.0;           // s
    std::vector<double> grid;        // sample times, 0 .. duration
    std::function<double(double)> delta_of_t;  // rad/s
    std::function<double(double)> g_of_t;      // rad/s
    double kappa = 0.0;              // rad/s, constant
    CouplingKind kind = CouplingKind::JC;
    bool constant_params = false;    // delta and g independent of t

    void validate() const {
        if (!(duration > 0.0)) throw std::invalid_argument("Schedule: duration <= 0");
        if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != duration)
            throw std::invalid_argument("Schedule: grid must run 0 .. duration");
        for (size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw std::invalid_argument("Schedule: grid not strictly increasing");
        if (!delta_of_t || !g_of_t)
            throw std::invalid_argument("Schedule: delta_of_t/g_of_t not set");
    }

    JCHParams params_at(double t) const {
        return JCHParams{delta_of_t(t), g_of_t(t), kappa, kind};
    }

    /// Fastest ordinary frequency (Hz) appearing in the pulse, sampled
    /// densely over [0, duration].
    double max_rate_hz(int n_samples = 1024) const {
        double m = 0.0;
        for (int i = 0; i <= n_samples; ++i) {
            const double t = duration * i / n_samples;
            m = std::max(m, std::abs(delta_of_t(t)));
            m = std::max(m, 2.0 * std::abs(g_of_t(t)));
        }
        m = std::max(m, std::abs(kappa));
        return m / two_pi;
    }
};

/// Quasi-static dephasing: one Gaussian detuning offset per trajectory.
struct NoiseModel {
    double sigma_detuning = 0.0;  // rms excursion (rad/s)
    int n_trajectories = 200;
    std::uint64_t seed = 0;

    void validate() const {
        if (sigma_detuning < 0.0) throw std::invalid_argument("NoiseModel: sigma < 0");
        if (n_trajectories < 1)
            throw std::invalid_argument("NoiseModel: n_trajectories < 1");
    }
};

/// Result of a run: states per grid time (noiseless) or ensemble-averaged
/// expectation values per grid time (noisy).
struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;                 // noiseless runs
    std::vector<std::vector<double>> expectations;   // noisy runs: [time][op]
};

namespace detail {

// psi <- exp(-i H dt) psi via a scaled Taylor series; exact to machine
// precision for the step sizes the precondition admits.
inline void apply_step(const Matrix& h, double dt, Vector& psi) {
    const double scale = h.cwiseAbs().rowwise().sum().maxCoeff() * std::abs(dt);
    const int n_sub = std::max(1, static_cast<int>(std::ceil(scale / 0.5)));
    const Complex factor(0.0, -dt / n_sub);
    Vector term(psi.size()), result(psi.size());
    for (int s = 0; s < n_sub; ++s) {
        result = psi;
        term = psi;
        for (int k = 1; k <= 64; ++k) {
            term = (factor / double(k)) * (h * term).eval();
            result += term;
            if (term.norm() < 1e-16 * result.norm()) break;
        }
        psi = result;
    }
}

inline void check_step(const Schedule& schedule, double step) {
    const double fmax = schedule.max_rate_hz();
    if (fmax > 0.0 && step > 1.0 / (50.0 * fmax))
        throw std::invalid_argument(
            "evolve: step too large: " + std::to_string(step * 1e6) +
            " us exceeds 1/(50 f_max) = " + std::to_string(1e6 / (50.0 * fmax)) +
            " us for f_max = " + std::to_string(fmax * 1e-3) + " kHz");
}

// Integrates with piecewise-constant midpoint exponentiation, calling
// `record` at every grid time (including t = 0).
template <typename Record>
void integrate(const Schedule& schedule, const StateVector& psi0, double step,
               double delta_offset, Record&& record) {
    const Basis& basis = *psi0.basis;
    Vector psi = psi0.amplitudes;
    record(0.0, psi);

    Matrix h_const;
    if (schedule.constant_params) {
        JCHParams p = schedule.params_at(0.0);
        p.delta += delta_offset;
        h_const = hamiltonian(p, basis).matrix;
    }

    for (size_t i = 1; i < schedule.grid.size(); ++i) {
        const double t0 = schedule.grid[i - 1];
        const double t1 = schedule.grid[i];
        const int n_sub = std::max(1, static_cast<int>(std::ceil((t1 - t0) / step)));
        const double dt = (t1 - t0) / n_sub;
        for (int s = 0; s < n_sub; ++s) {
            if (schedule.constant_params) {
                apply_step(h_const, dt, psi);
            } else {
                const double t_mid = t0 + (s + 0.5) * dt;
                JCHParams p = schedule.params_at(t_mid);
                p.delta += delta_offset;
                apply_step(hamiltonian(p, basis).matrix, dt, psi);
            }
        }
        record(t1, psi);
    }
}

}  // namespace detail

/// Noiseless evolution of psi0 over the schedule grid.
inline Trajectory evolve(const Schedule& schedule, const StateVector& psi0,
                         double step) {
    schedule.validate();
    detail::check_step(schedule, step);
    Trajectory traj;
    detail::integrate(schedule, psi0, step, 0.0, [&](double t, const Vector& psi) {
        traj.times.push_back(t);
        traj.states.emplace_back(*psi0.basis, psi);
    });
    return traj;
}

/// Monte Carlo ensemble over static detuning offsets; records the ensemble
/// averages <psi|op|psi> for each operator in `ops` at every grid time.
/// Deterministic for a fixed seed; trajectories are accumulated in index order.
inline Trajectory evolve_noisy(const Schedule& schedule, const StateVector& psi0,
                               const NoiseModel& noise, double step,
                               std::span<const Operator> ops) {
    schedule.validate();
    noise.validate();
    detail::check_step(schedule, step);
    for (const Operator& op : ops)
        if (!(*op.basis == *psi0.basis))
            throw std::invalid_argument("evolve_noisy: operator basis mismatch");

    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, noise.sigma_detuning);
    std::vector<double> offsets(noise.n_trajectories, 0.0);
    if (noise.sigma_detuning > 0.0)
        for (double& d : offsets) d = gauss(rng);

    Trajectory traj;
    traj.times = schedule.grid;
    traj.expectations.assign(schedule.grid.size(),
                             std::vector<double>(ops.size(), 0.0));

    for (int k = 0; k < noise.n_trajectories; ++k) {
        size_t row = 0;
        detail::integrate(schedule, psi0, step, offsets[k],
                          [&](double, const Vector& psi) {
                              for (size_t j = 0; j < ops.size(); ++j)
                                  traj.expectations[row][j] +=
                                      std::real(psi.dot(ops[j].matrix * psi));
                              ++row;
                          });
    }
    const double inv_n = 1.0 / noise.n_trajectories;
    for (auto& row : traj.expectations)
        for (double& v : row) v *= inv_n;
    return traj;
}

}  // namespace jch

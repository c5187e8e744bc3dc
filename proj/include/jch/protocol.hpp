#pragma once

#include "jch/propagate.hpp"

#include <cmath>
#include <stdexcept>

// The two experiments as Schedules, plus the analytical reference states:
// the atomic insulator |ee00>, the phonon superfluid |gg> (x) a_r^dag^2 |00> / sqrt(2),
// and the approximate polaritonic superfluid.

namespace jch {

/// Adiabatic insulator -> superfluid sweep: linear detuning ramp with a
/// Gaussian coupling envelope whose value at both pulse edges is
/// edge_factor * g_peak.
struct SweepParams {
    double delta_start = khz_to_rad(-41.0);
    double delta_end = khz_to_rad(59.0);
    double duration = 960e-6;
    double g_peak = khz_to_rad(7.0);   // 2g/2pi peaks at 14 kHz
    double edge_factor = 0.29;
    double kappa = khz_to_rad(6.0);
    int n_samples = 240;               // grid intervals

    void validate() const {
        if (!(duration > 0.0)) throw std::invalid_argument("SweepParams: duration <= 0");
        if (!(edge_factor > 0.0 && edge_factor < 1.0))
            throw std::invalid_argument("SweepParams: edge_factor must be in (0,1)");
        if (!(g_peak > 0.0)) throw std::invalid_argument("SweepParams: g_peak <= 0");
        if (n_samples < 2) throw std::invalid_argument("SweepParams: n_samples < 2");
    }

    /// Gaussian width fixed by the edge condition g(0) = edge_factor * g_peak.
    double envelope_sigma() const {
        return 0.5 * duration / std::sqrt(2.0 * std::log(1.0 / edge_factor));
    }
};

/// Blue-sideband (anti-JC) dynamics: constant coupling, constant detuning.
struct DynamicsParams {
    double g = khz_to_rad(6.0);        // 2g/2pi = 12.0 kHz
    double kappa = khz_to_rad(5.4);
    double duration = 1.0e-3;
    double detuning_offset = 0.0;      // 0 = on blue-sideband resonance
    int n_samples = 200;

    void validate() const {
        if (!(g > 0.0 && duration > 0.0))
            throw std::invalid_argument("DynamicsParams: need g, duration > 0");
        if (n_samples < 2) throw std::invalid_argument("DynamicsParams: n_samples < 2");
    }
};

namespace detail {
inline std::vector<double> uniform_grid(double duration, int n_intervals) {
    std::vector<double> grid(n_intervals + 1);
    for (int i = 0; i <= n_intervals; ++i) grid[i] = duration * i / n_intervals;
    grid.back() = duration;
    return grid;
}
}  // namespace detail

inline Schedule sweep_schedule(const SweepParams& p) {
    p.validate();
    Schedule s;
    s.duration = p.duration;
    s.grid = detail::uniform_grid(p.duration, p.n_samples);
    const double slope = (p.delta_end - p.delta_start) / p.duration;
    s.delta_of_t = [p, slope](double t) { return p.delta_start + slope * t; };
    const double t_mid = 0.5 * p.duration;
    const double sigma = p.envelope_sigma();
    s.g_of_t = [p, t_mid, sigma](double t) {
        const double u = (t - t_mid) / sigma;
        return p.g_peak * std::exp(-0.5 * u * u);
    };
    s.kappa = p.kappa;
    s.kind = CouplingKind::JC;
    return s;
}

inline Schedule dynamics_schedule(const DynamicsParams& p) {
    p.validate();
    Schedule s;
    s.duration = p.duration;
    s.grid = detail::uniform_grid(p.duration, p.n_samples);
    s.delta_of_t = [offset = p.detuning_offset](double) { return offset; };
    s.g_of_t = [g = p.g](double) { return g; };
    s.kappa = p.kappa;
    s.kind = CouplingKind::AntiJC;
    s.constant_params = true;
    return s;
}

namespace detail {
inline int required_index(const Basis& basis, const BasisState& s) {
    const int i = basis.index_of(s);
    if (i < 0)
        throw std::invalid_argument("reference state component not in basis");
    return i;
}
}  // namespace detail

/// Atomic insulator |e1 e2; 0 0>.
inline StateVector state_atI(const Basis& basis) {
    return basis_ket(basis, BasisState{{1, 1}, {0, 0}});
}

/// Phonon superfluid |g1 g2> (x) (|11>/sqrt(2) - |20>/2 - |02>/2).
inline StateVector state_phSF(const Basis& basis) {
    if (basis.n_max() < 2)
        throw std::invalid_argument("state_phSF: needs n_max >= 2");
    Vector amp = Vector::Zero(basis.size());
    amp[detail::required_index(basis, BasisState{{0, 0}, {1, 1}})] = 1.0 / std::sqrt(2.0);
    amp[detail::required_index(basis, BasisState{{0, 0}, {2, 0}})] = -0.5;
    amp[detail::required_index(basis, BasisState{{0, 0}, {0, 2}})] = -0.5;
    return StateVector(basis, std::move(amp));
}

/// Approximate polaritonic superfluid at Delta ~ 0:
/// psi_phSF/sqrt(3) + psi_atI/sqrt(6)
/// + (|eg;10> + |ge;01> - |eg;01> - |ge;10>) / (2 sqrt(2)).
inline StateVector state_polaritonicSF(const Basis& basis) {
    if (basis.n_max() < 2)
        throw std::invalid_argument("state_polaritonicSF: needs n_max >= 2");
    Vector amp = (1.0 / std::sqrt(3.0)) * state_phSF(basis).amplitudes +
                 (1.0 / std::sqrt(6.0)) * state_atI(basis).amplitudes;
    const double c = 1.0 / (2.0 * std::sqrt(2.0));
    amp[detail::required_index(basis, BasisState{{1, 0}, {1, 0}})] += c;
    amp[detail::required_index(basis, BasisState{{0, 1}, {0, 1}})] += c;
    amp[detail::required_index(basis, BasisState{{1, 0}, {0, 1}})] -= c;
    amp[detail::required_index(basis, BasisState{{0, 1}, {1, 0}})] -= c;
    return StateVector(basis, std::move(amp));
}

}  // namespace jch

#pragma once

#include "jch/fockspace.hpp"
#include "jch/units.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

// Two-ion Jaynes-Cummings-Hubbard model: Hamiltonians, physical rates from
// trap parameters, number operators and local<->collective mode transforms.
//
//   H = Delta * sum_j |e_j><e_j|
//     + g * sum_j (a_j^dag s_j^- + a_j s_j^+)        (JC; swap s^- <-> s^+ for anti-JC)
//     + (kappa/2) (a_1^dag a_2 + a_2^dag a_1)
//
// everything in rad/s, hbar = 1.

namespace jch {

struct TrapConfig {
    double omega_x;  // radial secular angular frequency (rad/s)
    double omega_z;  // axial secular angular frequency (rad/s)
    double ion_mass = constants::mass_ca40;       // kg
    double charge = constants::elementary_charge; // C
    std::optional<double> d0;  // inter-ion distance (m); derived when absent

    void validate() const {
        if (!(omega_x > 0.0 && omega_z > 0.0 && omega_x > omega_z))
            throw std::invalid_argument("TrapConfig: need omega_x > omega_z > 0");
        if (!(ion_mass > 0.0 && charge > 0.0))
            throw std::invalid_argument("TrapConfig: need positive mass and charge");
    }
};

struct JCHParams {
    double delta = 0.0;  // detuning from red-sideband resonance (rad/s)
    double g = 0.0;      // JC coupling coefficient (rad/s)
    double kappa = 0.0;  // hopping rate (rad/s)
    CouplingKind kind = CouplingKind::JC;
};

/// Dense operator over a Basis. Hamiltonians and number operators are
/// Hermitian; ladder/collective-mode operators in general are not.
struct Operator {
    const Basis* basis = nullptr;
    Matrix matrix;

    Operator() = default;
    Operator(const Basis& b, Matrix m) : basis(&b), matrix(std::move(m)) {
        if (matrix.rows() != b.size() || matrix.cols() != b.size())
            throw std::invalid_argument("Operator: matrix size != basis size");
    }

    Operator adjoint() const { return Operator(*basis, matrix.adjoint()); }

    double hermiticity_defect() const {
        return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    }
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }
};

using HermitianOperator = Operator;

/// Equilibrium two-ion distance: d0^3 = e^2 / (2 pi eps0 m omega_z^2).
inline double equilibrium_distance(const TrapConfig& trap) {
    trap.validate();
    if (trap.d0) return *trap.d0;
    const double e = trap.charge;
    return std::cbrt(e * e / (two_pi * constants::epsilon0 * trap.ion_mass *
                              trap.omega_z * trap.omega_z));
}

/// Radial phonon hopping rate kappa = omega_z^2 / (2 omega_x)
/// = e^2 / (4 pi eps0 d0^3 m omega_x) at the equilibrium distance.
inline double hopping_rate(const TrapConfig& trap) {
    trap.validate();
    if (trap.d0) {
        const double e = trap.charge;
        const double d = *trap.d0;
        return e * e /
               (2.0 * two_pi * constants::epsilon0 * d * d * d * trap.ion_mass *
                trap.omega_x);
    }
    return trap.omega_z * trap.omega_z / (2.0 * trap.omega_x);
}

/// Coulomb correction to the radial frequency: Delta omega_x = -kappa/2.
inline double radial_correction(const TrapConfig& trap) {
    return -0.5 * hopping_rate(trap);
}

/// Red-sideband coupling coefficient g = eta * Omega0 / 2.
inline double jc_coupling(double eta, double omega0) {
    if (!(eta >= 0.0 && eta < 1.0))
        throw std::invalid_argument("jc_coupling: eta must be in [0,1)");
    if (omega0 < 0.0) throw std::invalid_argument("jc_coupling: omega0 must be >= 0");
    return 0.5 * eta * omega0;
}

namespace detail {

// Adds c * |to><from| (plus nothing else). Targets outside the basis are
// dropped: hard truncation at n_max, and sector filtering when restricted.
inline void add_element(Matrix& m, const Basis& basis, const BasisState& to,
                        const BasisState& from, double c) {
    const int i = basis.index_of(to);
    const int j = basis.index_of(from);
    if (i >= 0 && j >= 0) m(i, j) += c;
}

inline Matrix build_hamiltonian(const JCHParams& p, const Basis& basis) {
    const int dim = basis.size();
    Matrix h = Matrix::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        const BasisState& s = basis.state(j);
        h(j, j) += p.delta * (s.atom[0] + s.atom[1]);
        for (int site = 0; site < 2; ++site) {
            // JC: a^dag s^-  flips |e,n> -> |g,n+1>; anti-JC: a^dag s^+
            const int src = (p.kind == CouplingKind::JC) ? 1 : 0;
            if (s.atom[site] == src) {
                BasisState t = s;
                t.atom[site] = 1 - src;
                t.phonon[site] += 1;
                const double amp = p.g * std::sqrt(double(s.phonon[site] + 1));
                add_element(h, basis, t, s, amp);
                add_element(h, basis, s, t, amp);
            }
        }
        // hopping (kappa/2) a_1^dag a_2 + h.c.
        if (s.phonon[1] >= 1) {
            BasisState t = s;
            t.phonon[0] += 1;
            t.phonon[1] -= 1;
            const double amp = 0.5 * p.kappa * std::sqrt(double(s.phonon[1])) *
                               std::sqrt(double(s.phonon[0] + 1));
            add_element(h, basis, t, s, amp);
            add_element(h, basis, s, t, amp);
        }
    }
    return h;
}

}  // namespace detail

inline HermitianOperator jch_hamiltonian(const JCHParams& params, const Basis& basis) {
    if (params.g < 0.0) throw std::invalid_argument("jch_hamiltonian: g must be >= 0");
    if (basis.config().sector && basis.config().kind != CouplingKind::JC)
        throw std::invalid_argument("jch_hamiltonian: sector/kind mismatch");
    JCHParams p = params;
    p.kind = CouplingKind::JC;
    return HermitianOperator(basis, detail::build_hamiltonian(p, basis));
}

inline HermitianOperator anti_jc_hamiltonian(const JCHParams& params,
                                             const Basis& basis) {
    if (params.g < 0.0)
        throw std::invalid_argument("anti_jc_hamiltonian: g must be >= 0");
    if (basis.config().sector && basis.config().kind != CouplingKind::AntiJC)
        throw std::invalid_argument("anti_jc_hamiltonian: sector/kind mismatch");
    JCHParams p = params;
    p.kind = CouplingKind::AntiJC;
    return HermitianOperator(basis, detail::build_hamiltonian(p, basis));
}

inline HermitianOperator hamiltonian(const JCHParams& params, const Basis& basis) {
    return params.kind == CouplingKind::JC ? jch_hamiltonian(params, basis)
                                           : anti_jc_hamiltonian(params, basis);
}

/// (N_j, N_{a,j}, N_{p,j}) for site 1 or 2; all diagonal in the canonical basis.
inline std::tuple<HermitianOperator, HermitianOperator, HermitianOperator>
number_operators(const Basis& basis, int site) {
    if (site != 1 && site != 2)
        throw std::invalid_argument("number_operators: site must be 1 or 2");
    const int k = site - 1;
    const int dim = basis.size();
    Matrix na = Matrix::Zero(dim, dim), np = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        na(i, i) = basis.state(i).atom[k];
        np(i, i) = basis.state(i).phonon[k];
    }
    return {HermitianOperator(basis, na + np), HermitianOperator(basis, na),
            HermitianOperator(basis, np)};
}

/// Local annihilation operator a_site (site 1-based).
inline Operator annihilation_operator(const Basis& basis, int site) {
    if (site != 1 && site != 2)
        throw std::invalid_argument("annihilation_operator: site must be 1 or 2");
    const int k = site - 1;
    const int dim = basis.size();
    Matrix a = Matrix::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        const BasisState& s = basis.state(j);
        if (s.phonon[k] >= 1) {
            BasisState t = s;
            t.phonon[k] -= 1;
            const int i = basis.index_of(t);
            if (i >= 0) a(i, j) = std::sqrt(double(s.phonon[k]));
        }
    }
    return Operator(basis, std::move(a));
}

/// COM and rocking annihilation operators a_c = (a1+a2)/sqrt(2),
/// a_r = (a1-a2)/sqrt(2).
inline std::pair<Operator, Operator> collective_mode_ops(const Basis& basis) {
    const Operator a1 = annihilation_operator(basis, 1);
    const Operator a2 = annihilation_operator(basis, 2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return {Operator(basis, inv_sqrt2 * (a1.matrix + a2.matrix)),
            Operator(basis, inv_sqrt2 * (a1.matrix - a2.matrix))};
}

}  // namespace jch

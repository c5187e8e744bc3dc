#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

// Truncated two-site spin (x) Fock Hilbert space: basis enumeration,
// conserved-excitation sector restriction and state-vector algebra.

namespace jch {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

enum class CouplingKind { JC, AntiJC };

/// Truncation of the two-site Hilbert space. `sector`, when set, keeps only
/// basis states with the conserved excitation number N of the given coupling
/// kind (JC: phonons + excited atoms; anti-JC: phonons + ground atoms).
struct TruncationConfig {
    int n_sites = 2;  // only 2 is supported
    int n_max = 5;    // max phonon quantum number per site, inclusive
    std::optional<int> sector;
    CouplingKind kind = CouplingKind::JC;
};

/// One tensor-product basis ket: atomic bit (0 = |g>, 1 = |e>) and phonon
/// count per site.
struct BasisState {
    std::array<int, 2> atom;
    std::array<int, 2> phonon;

    bool operator==(const BasisState&) const = default;

    /// Conserved excitation number under the given coupling kind.
    int excitation_number(CouplingKind kind) const {
        int n = phonon[0] + phonon[1];
        if (kind == CouplingKind::JC)
            n += atom[0] + atom[1];
        else
            n += (1 - atom[0]) + (1 - atom[1]);
        return n;
    }
};

/// Ordered basis with a bijective index. Ordering is lexicographic on
/// (atom1, atom2, phonon1, phonon2), which fixes all matrix layouts.
class Basis {
public:
    Basis(std::vector<BasisState> states, TruncationConfig cfg)
        : states_(std::move(states)), cfg_(cfg) {
        const int span = 4 * (cfg_.n_max + 1) * (cfg_.n_max + 1);
        lookup_.assign(span, -1);
        for (int i = 0; i < static_cast<int>(states_.size()); ++i)
            lookup_[encode(states_[i])] = i;
    }

    int size() const { return static_cast<int>(states_.size()); }
    const std::vector<BasisState>& states() const { return states_; }
    const BasisState& state(int i) const { return states_[i]; }
    const TruncationConfig& config() const { return cfg_; }
    int n_max() const { return cfg_.n_max; }

    /// Position of a ket in this basis, or -1 if truncated away.
    int index_of(const BasisState& s) const {
        if (s.phonon[0] < 0 || s.phonon[0] > cfg_.n_max || s.phonon[1] < 0 ||
            s.phonon[1] > cfg_.n_max)
            return -1;
        return lookup_[encode(s)];
    }

    bool operator==(const Basis& other) const { return states_ == other.states_; }

private:
    int encode(const BasisState& s) const {
        return ((s.atom[0] * 2 + s.atom[1]) * (cfg_.n_max + 1) + s.phonon[0]) *
                   (cfg_.n_max + 1) +
               s.phonon[1];
    }

    std::vector<BasisState> states_;
    TruncationConfig cfg_;
    std::vector<int> lookup_;
};

/// Full tensor basis of size (2(n_max+1))^2, or the conserved-N sector of it.
inline Basis build_basis(const TruncationConfig& cfg) {
    if (cfg.n_sites != 2)
        throw std::invalid_argument("fockspace: only n_sites = 2 is supported");
    if (cfg.n_max < 0) throw std::invalid_argument("fockspace: n_max must be >= 0");
    if (cfg.sector) {
        if (*cfg.sector < 0 || *cfg.sector > 2 * cfg.n_max + 2)
            throw std::invalid_argument("fockspace: empty sector");
    }
    std::vector<BasisState> states;
    for (int a1 = 0; a1 <= 1; ++a1)
        for (int a2 = 0; a2 <= 1; ++a2)
            for (int n1 = 0; n1 <= cfg.n_max; ++n1)
                for (int n2 = 0; n2 <= cfg.n_max; ++n2) {
                    BasisState s{{a1, a2}, {n1, n2}};
                    if (cfg.sector && s.excitation_number(cfg.kind) != *cfg.sector)
                        continue;
                    states.push_back(s);
                }
    if (states.empty()) throw std::invalid_argument("fockspace: empty sector");
    return Basis(std::move(states), cfg);
}

/// Normalized amplitude vector over a Basis. Immutable by convention after
/// construction; the basis must outlive the state.
struct StateVector {
    const Basis* basis = nullptr;
    Vector amplitudes;

    StateVector() = default;
    StateVector(const Basis& b, Vector amp) : basis(&b), amplitudes(std::move(amp)) {
        if (amplitudes.size() != b.size())
            throw std::invalid_argument("StateVector: amplitude size != basis size");
    }

    double norm() const { return amplitudes.norm(); }

    StateVector normalized() const {
        StateVector out = *this;
        const double n = norm();
        if (n <= 0.0) throw std::runtime_error("StateVector: zero norm");
        out.amplitudes /= n;
        return out;
    }
};

/// Unit ket on a single basis state.
inline StateVector basis_ket(const Basis& basis, const BasisState& s) {
    const int i = basis.index_of(s);
    if (i < 0) throw std::invalid_argument("basis_ket: state not in basis");
    Vector amp = Vector::Zero(basis.size());
    amp[i] = 1.0;
    return StateVector(basis, std::move(amp));
}

/// Total probability weight of `state` inside the conserved-N sector.
inline double sector_projection(const StateVector& state, int n, CouplingKind kind) {
    double w = 0.0;
    for (int i = 0; i < state.basis->size(); ++i)
        if (state.basis->state(i).excitation_number(kind) == n)
            w += std::norm(state.amplitudes[i]);
    return w;
}

/// |<a|b>|^2 for states over the same basis.
inline double fidelity(const StateVector& a, const StateVector& b) {
    if (!(*a.basis == *b.basis))
        throw std::invalid_argument("fidelity: basis mismatch");
    return std::norm(a.amplitudes.dot(b.amplitudes));
}

}  // namespace jch

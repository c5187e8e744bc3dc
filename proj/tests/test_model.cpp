#include "jch/model.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

using namespace jch;

namespace {

const TrapConfig ref_trap{mhz_to_rad(2.1), mhz_to_rad(0.17)};

double commutator_norm(const Matrix& a, const Matrix& b) {
    return (a * b - b * a).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("hopping rate and inter-ion distance for the reference trap") {
    const double kappa_khz = rad_to_khz(hopping_rate(ref_trap));
    CHECK(kappa_khz == Catch::Approx(0.17e3 * 0.17 / (2.0 * 2.1)).epsilon(1e-12));
    CHECK(kappa_khz > 5.0);  // stated 5-7 kHz band
    CHECK(kappa_khz < 7.0);

    const double d0 = equilibrium_distance(ref_trap);
    CHECK(d0 > 18e-6);  // stated 18-20 um band
    CHECK(d0 < 20e-6);
    CHECK(d0 == Catch::Approx(18.3e-6).margin(0.2e-6));

    // both closed forms agree at the equilibrium distance
    TrapConfig with_d0 = ref_trap;
    with_d0.d0 = d0;
    CHECK(hopping_rate(with_d0) ==
          Catch::Approx(hopping_rate(ref_trap)).epsilon(1e-6));
}

TEST_CASE("radial correction is -kappa/2") {
    CHECK(rad_to_khz(radial_correction(ref_trap)) ==
          Catch::Approx(-3.44).margin(0.01));
    for (double fx : {1.5, 2.1, 3.0})
        for (double fz : {0.1, 0.17, 0.4}) {
            const TrapConfig trap{mhz_to_rad(fx), mhz_to_rad(fz)};
            CHECK(radial_correction(trap) ==
                  Catch::Approx(-0.5 * hopping_rate(trap)).epsilon(1e-14));
        }
}

TEST_CASE("jc_coupling") {
    CHECK(rad_to_khz(jc_coupling(0.1, khz_to_rad(120.0))) == Catch::Approx(6.0));
    CHECK(jc_coupling(0.0, khz_to_rad(120.0)) == 0.0);
    CHECK(jc_coupling(0.05, khz_to_rad(200.0)) ==
          Catch::Approx(2.0 * jc_coupling(0.05, khz_to_rad(100.0))));
    CHECK_THROWS_AS(jc_coupling(1.5, 1.0), std::invalid_argument);
}

TEST_CASE("zero-parameter Hamiltonian is the zero matrix") {
    const Basis basis = build_basis({2, 2, std::nullopt});
    const auto h = jch_hamiltonian({0.0, 0.0, 0.0}, basis);
    CHECK(h.matrix.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-excitation block matches a direct 4x4 diagonalization") {
    const double g = khz_to_rad(6.0), kappa = khz_to_rad(5.4);
    const Basis basis = build_basis({2, 2, 1, CouplingKind::JC});
    REQUIRE(basis.size() == 4);
    const auto h = jch_hamiltonian({0.0, g, kappa}, basis);

    // Written out over {|eg00>, |ge00>, |gg10>, |gg01>} in basis order.
    const int i_eg = basis.index_of(BasisState{{1, 0}, {0, 0}});
    const int i_ge = basis.index_of(BasisState{{0, 1}, {0, 0}});
    const int i_10 = basis.index_of(BasisState{{0, 0}, {1, 0}});
    const int i_01 = basis.index_of(BasisState{{0, 0}, {0, 1}});
    Matrix ref = Matrix::Zero(4, 4);
    ref(i_eg, i_10) = ref(i_10, i_eg) = g;
    ref(i_ge, i_01) = ref(i_01, i_ge) = g;
    ref(i_10, i_01) = ref(i_01, i_10) = 0.5 * kappa;
    CHECK((h.matrix - ref).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::SelfAdjointEigenSolver<Matrix> got(h.matrix), expect(ref);
    for (int k = 0; k < 4; ++k)
        CHECK(got.eigenvalues()[k] ==
              Catch::Approx(expect.eigenvalues()[k]).margin(1e-9));
    // analytic: eigenvalues +-sqrt(g^2 + (kappa/4)^2) +- kappa/4
    const double root = std::sqrt(g * g + kappa * kappa / 16.0);
    const std::array<double, 4> analytic{-root - kappa / 4.0, -root + kappa / 4.0,
                                         root - kappa / 4.0, root + kappa / 4.0};
    for (int k = 0; k < 4; ++k)
        CHECK(got.eigenvalues()[k] == Catch::Approx(analytic[k]).margin(1e-6));
}

TEST_CASE("hopping matrix element carries the ladder factor sqrt(2)") {
    const double kappa = khz_to_rad(5.0);
    const Basis basis = build_basis({2, 3, std::nullopt});
    const auto h = jch_hamiltonian({0.0, 0.0, kappa}, basis);
    const int i_20 = basis.index_of(BasisState{{0, 0}, {2, 0}});
    const int i_11 = basis.index_of(BasisState{{0, 0}, {1, 1}});
    CHECK(std::real(h.matrix(i_20, i_11)) ==
          Catch::Approx(0.5 * kappa * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("anti-JC Hamiltonian equals JC under g<->e relabeling") {
    const Basis basis = build_basis({2, 2, std::nullopt});
    const JCHParams p{khz_to_rad(3.0), khz_to_rad(6.0), khz_to_rad(5.4)};
    const Matrix h_anti = anti_jc_hamiltonian(p, basis).matrix;

    JCHParams p_jc = p;
    p_jc.delta = 0.0;  // the detuning term tracks |e><e| in both kinds
    const Matrix h_jc = jch_hamiltonian(p_jc, basis).matrix;
    Matrix permuted = Matrix::Zero(basis.size(), basis.size());
    std::vector<int> relabel(basis.size());
    for (int i = 0; i < basis.size(); ++i) {
        BasisState s = basis.state(i);
        s.atom[0] = 1 - s.atom[0];
        s.atom[1] = 1 - s.atom[1];
        relabel[i] = basis.index_of(s);
    }
    for (int i = 0; i < basis.size(); ++i)
        for (int j = 0; j < basis.size(); ++j)
            permuted(i, j) = h_jc(relabel[i], relabel[j]);
    // add back the untouched detuning term
    for (int i = 0; i < basis.size(); ++i)
        permuted(i, i) += p.delta * (basis.state(i).atom[0] + basis.state(i).atom[1]);
    CHECK((h_anti - permuted).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("conserved-number commutators vanish away from the truncation edge") {
    const Basis basis = build_basis({2, 5, std::nullopt});
    const JCHParams p{khz_to_rad(-10.0), khz_to_rad(7.0), khz_to_rad(6.0)};
    const auto [n1, na1, np1] = number_operators(basis, 1);
    const auto [n2, na2, np2] = number_operators(basis, 2);
    const Matrix n_jc = n1.matrix + n2.matrix;
    const Matrix n_anti =
        np1.matrix + np2.matrix +
        (Matrix::Identity(basis.size(), basis.size()) * 2.0 - na1.matrix -
         na2.matrix);

    // restrict the commutator to states with phonon counts <= n_max - 2
    const auto away_from_edge = [&](const Matrix& comm) {
        double m = 0.0;
        for (int i = 0; i < basis.size(); ++i)
            for (int j = 0; j < basis.size(); ++j) {
                const BasisState& sj = basis.state(j);
                if (sj.phonon[0] <= basis.n_max() - 2 &&
                    sj.phonon[1] <= basis.n_max() - 2)
                    m = std::max(m, std::abs(comm(i, j)));
            }
        return m;
    };
    const Matrix h_jc = jch_hamiltonian(p, basis).matrix;
    const Matrix h_anti = anti_jc_hamiltonian(p, basis).matrix;
    CHECK(away_from_edge(h_jc * n_jc - n_jc * h_jc) < 1e-10);
    CHECK(away_from_edge(h_anti * n_anti - n_anti * h_anti) < 1e-10);

    // on the sector-restricted (untruncated) space the commutator is exactly 0
    const Basis sector = build_basis({2, 3, 2, CouplingKind::JC});
    const auto [m1, ma1, mp1] = number_operators(sector, 1);
    const auto [m2, ma2, mp2] = number_operators(sector, 2);
    CHECK(commutator_norm(jch_hamiltonian(p, sector).matrix,
                          m1.matrix + m2.matrix) < 1e-10);
}

TEST_CASE("Hamiltonians are Hermitian and linear in each parameter") {
    const Basis basis = build_basis({2, 4, std::nullopt});
    const JCHParams a{khz_to_rad(-11.0), khz_to_rad(3.0), khz_to_rad(2.0)};
    const JCHParams b{khz_to_rad(5.0), khz_to_rad(4.0), khz_to_rad(7.0)};
    const Matrix ha = jch_hamiltonian(a, basis).matrix;
    const Matrix hb = jch_hamiltonian(b, basis).matrix;
    CHECK(jch_hamiltonian(a, basis).hermiticity_defect() <= 1e-12);
    CHECK(anti_jc_hamiltonian(b, basis).hermiticity_defect() <= 1e-12);

    const JCHParams sum{a.delta + b.delta, a.g + b.g, a.kappa + b.kappa};
    CHECK((jch_hamiltonian(sum, basis).matrix - ha - hb).cwiseAbs().maxCoeff() <
          1e-9);
}

TEST_CASE("sector/kind mismatch is rejected") {
    const Basis jc_sector = build_basis({2, 2, 2, CouplingKind::JC});
    CHECK_THROWS_AS(anti_jc_hamiltonian({0.0, 1.0, 0.0}, jc_sector),
                    std::invalid_argument);
    const Basis anti_sector = build_basis({2, 2, 2, CouplingKind::AntiJC});
    CHECK_THROWS_AS(jch_hamiltonian({0.0, 1.0, 0.0}, anti_sector),
                    std::invalid_argument);
}

TEST_CASE("number operators") {
    const Basis basis = build_basis({2, 2, std::nullopt});
    const auto [n1, na1, np1] = number_operators(basis, 1);
    const auto [n2, na2, np2] = number_operators(basis, 2);
    CHECK((n1.matrix - na1.matrix - np1.matrix).cwiseAbs().maxCoeff() == 0.0);

    const int i_ee00 = basis.index_of(BasisState{{1, 1}, {0, 0}});
    const int i_gg20 = basis.index_of(BasisState{{0, 0}, {2, 0}});
    CHECK(std::real(n1.matrix(i_ee00, i_ee00)) == 1.0);
    CHECK(std::real(n1.matrix(i_gg20, i_gg20)) == 2.0);

    const Basis sector = build_basis({2, 2, 2, CouplingKind::JC});
    const auto [s1, sa1, sp1] = number_operators(sector, 1);
    const auto [s2, sa2, sp2] = number_operators(sector, 2);
    const Matrix total = s1.matrix + s2.matrix;
    for (int i = 0; i < sector.size(); ++i)
        CHECK(std::real(total(i, i)) == 2.0);

    CHECK_THROWS_AS(number_operators(basis, 3), std::invalid_argument);
}

TEST_CASE("collective mode operators") {
    const Basis basis = build_basis({2, 5, std::nullopt});
    const auto [a_c, a_r] = collective_mode_ops(basis);
    const Matrix comm_cc =
        a_c.matrix * a_c.adjoint().matrix - a_c.adjoint().matrix * a_c.matrix;
    const Matrix comm_cr =
        a_c.matrix * a_r.adjoint().matrix - a_r.adjoint().matrix * a_c.matrix;
    // truncation-edge columns excluded
    for (int j = 0; j < basis.size(); ++j) {
        const BasisState& s = basis.state(j);
        if (s.phonon[0] >= basis.n_max() || s.phonon[1] >= basis.n_max()) continue;
        CHECK(std::abs(comm_cc(j, j) - 1.0) < 1e-12);
        CHECK(comm_cr.col(j).cwiseAbs().maxCoeff() < 1e-12);
        for (int i = 0; i < basis.size(); ++i)
            if (i != j) CHECK(std::abs(comm_cc(i, j)) < 1e-12);
    }

    // a_r^dag^2 |gg00> / sqrt(2) is the phonon-superfluid wavefunction
    const int i_00 = basis.index_of(BasisState{{0, 0}, {0, 0}});
    Vector vac = Vector::Zero(basis.size());
    vac[i_00] = 1.0;
    const Vector ph_sf =
        (a_r.adjoint().matrix * a_r.adjoint().matrix * vac) / std::sqrt(2.0);
    CHECK(std::abs(ph_sf[basis.index_of(BasisState{{0, 0}, {2, 0}})] - 0.5) < 1e-12);
    CHECK(std::abs(ph_sf[basis.index_of(BasisState{{0, 0}, {1, 1}})] +
                   1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(ph_sf[basis.index_of(BasisState{{0, 0}, {0, 2}})] - 0.5) < 1e-12);
    CHECK(std::abs(ph_sf.norm() - 1.0) < 1e-12);

    // <00| a_c a_c^dag |00> = 1
    CHECK(std::abs((a_c.matrix * (a_c.adjoint().matrix * vac))[i_00] - 1.0) < 1e-12);

    // N_pr has eigenvalue 2 on the phonon-superfluid state
    const Matrix n_rock = a_r.adjoint().matrix * a_r.matrix;
    CHECK((n_rock * ph_sf - 2.0 * ph_sf).cwiseAbs().maxCoeff() < 1e-12);
}

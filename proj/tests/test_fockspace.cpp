#include "jch/fockspace.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace jch;

namespace {

// Brute-force sector count, independent of build_basis's filtering path.
int enumerate_sector(int n_max, int sector, CouplingKind kind) {
    int count = 0;
    for (int a1 = 0; a1 <= 1; ++a1)
        for (int a2 = 0; a2 <= 1; ++a2)
            for (int n1 = 0; n1 <= n_max; ++n1)
                for (int n2 = 0; n2 <= n_max; ++n2) {
                    const int atoms =
                        kind == CouplingKind::JC ? a1 + a2 : (1 - a1) + (1 - a2);
                    if (atoms + n1 + n2 == sector) ++count;
                }
    return count;
}

}  // namespace

TEST_CASE("full basis size is (2(n_max+1))^2") {
    CHECK(build_basis({2, 2, std::nullopt}).size() == 36);
    for (int n_max = 0; n_max <= 6; ++n_max) {
        const int side = 2 * (n_max + 1);
        CHECK(build_basis({2, n_max, std::nullopt}).size() == side * side);
    }
}

TEST_CASE("JC sector sizes match brute-force enumeration") {
    CHECK(build_basis({2, 2, 2, CouplingKind::JC}).size() == 8);
    // n_max = 1 truncates |gg20> and |gg02> out of the 8-state N = 2 sector
    CHECK(build_basis({2, 1, 2, CouplingKind::JC}).size() == 6);
    for (int n_max = 0; n_max <= 6; ++n_max)
        for (int sector = 0; sector <= 2 * n_max + 2; ++sector) {
            const TruncationConfig cfg{2, n_max, sector, CouplingKind::JC};
            CHECK(build_basis(cfg).size() ==
                  enumerate_sector(n_max, sector, CouplingKind::JC));
        }
}

TEST_CASE("sector basis equals filtering the full basis") {
    for (const auto kind : {CouplingKind::JC, CouplingKind::AntiJC}) {
        const Basis full = build_basis({2, 3, std::nullopt, kind});
        const Basis restricted = build_basis({2, 3, 2, kind});
        std::vector<BasisState> filtered;
        for (const BasisState& s : full.states())
            if (s.excitation_number(kind) == 2) filtered.push_back(s);
        REQUIRE(filtered.size() == size_t(restricted.size()));
        for (int i = 0; i < restricted.size(); ++i)
            CHECK(restricted.state(i) == filtered[i]);
    }
}

TEST_CASE("basis ordering is lexicographic and index is a bijection") {
    const Basis basis = build_basis({2, 2, std::nullopt});
    for (int i = 1; i < basis.size(); ++i) {
        const BasisState& a = basis.state(i - 1);
        const BasisState& b = basis.state(i);
        const auto key = [](const BasisState& s) {
            return std::array<int, 4>{s.atom[0], s.atom[1], s.phonon[0], s.phonon[1]};
        };
        CHECK(key(a) < key(b));
    }
    for (int i = 0; i < basis.size(); ++i) CHECK(basis.index_of(basis.state(i)) == i);
    CHECK(basis.index_of(BasisState{{0, 0}, {3, 0}}) == -1);
}

TEST_CASE("invalid truncation configs are rejected") {
    CHECK_THROWS_AS(build_basis({3, 2, std::nullopt}), std::invalid_argument);
    CHECK_THROWS_AS(build_basis({2, 2, 7}), std::invalid_argument);  // > 2 n_max + 2
    CHECK_THROWS_AS(build_basis({2, 2, -1}), std::invalid_argument);
}

TEST_CASE("sector_projection") {
    const Basis basis = build_basis({2, 2, std::nullopt});
    const StateVector ee00 = basis_ket(basis, BasisState{{1, 1}, {0, 0}});
    const StateVector gg00 = basis_ket(basis, BasisState{{0, 0}, {0, 0}});
    CHECK(sector_projection(ee00, 2, CouplingKind::JC) == Catch::Approx(1.0));
    CHECK(sector_projection(gg00, 2, CouplingKind::AntiJC) == Catch::Approx(1.0));

    StateVector mixed(basis, (ee00.amplitudes + gg00.amplitudes) / std::sqrt(2.0));
    CHECK(sector_projection(mixed, 2, CouplingKind::JC) == Catch::Approx(0.5));
    CHECK(sector_projection(mixed, 0, CouplingKind::JC) == Catch::Approx(0.5));
}

TEST_CASE("fidelity basics") {
    const Basis basis = build_basis({2, 1, std::nullopt});
    const StateVector a = basis_ket(basis, BasisState{{0, 0}, {0, 0}});
    const StateVector b = basis_ket(basis, BasisState{{1, 1}, {0, 0}});
    CHECK(fidelity(a, a) == Catch::Approx(1.0));
    CHECK(fidelity(a, b) == Catch::Approx(0.0));

    StateVector bell(basis, (a.amplitudes + b.amplitudes) / std::sqrt(2.0));
    CHECK(fidelity(bell, a) == Catch::Approx(0.5));

    const Basis other = build_basis({2, 2, std::nullopt});
    const StateVector c = basis_ket(other, BasisState{{0, 0}, {0, 0}});
    CHECK_THROWS_AS(fidelity(a, c), std::invalid_argument);
}

TEST_CASE("fidelity is symmetric and bounded on random states") {
    const Basis basis = build_basis({2, 2, std::nullopt});
    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss;
    const auto random_state = [&] {
        Vector v(basis.size());
        for (int i = 0; i < basis.size(); ++i) v[i] = Complex(gauss(rng), gauss(rng));
        return StateVector(basis, v / v.norm());
    };
    for (int trial = 0; trial < 100; ++trial) {
        const StateVector a = random_state();
        const StateVector b = random_state();
        const double f = fidelity(a, b);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0 + 1e-12);
        CHECK(f == Catch::Approx(fidelity(b, a)).margin(1e-14));
    }
}

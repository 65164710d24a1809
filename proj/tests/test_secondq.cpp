#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "qsim/secondq.hpp"

#include <filesystem>
#include <fstream>

using namespace qsim;
using namespace qsim::secondq;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream f(p);
    f << body;
    return p;
}

Matrix dense_monomial(const LadderMonomial& mono, int n_modes) {
    const auto dim = Eigen::Index(1) << n_modes;
    Matrix m = Matrix::Identity(dim, dim);
    for (const auto& [mode, dagger] : mono)
        m = m * (dagger ? oracles::ladder_dagger(mode, n_modes)
                        : oracles::ladder(mode, n_modes));
    return m;
}

Matrix strings_dense(const std::vector<PauliString>& strings) {
    REQUIRE(!strings.empty());
    Matrix acc = strings.front().dense();
    for (std::size_t i = 1; i < strings.size(); ++i) acc += strings[i].dense();
    return acc;
}

} // namespace

TEST_CASE("load_integrals parses sections and completes Hermitian partners") {
    auto path = write_temp("qsim_ints_ok.txt",
                           "# comment\n"
                           "norb 2\n"
                           "1body\n"
                           "0 0 -1.25\n"
                           "0 1 0.125\n"
                           "2body\n"
                           "0 1 1 0 0.5\n");
    auto set = load_integrals(path);
    CHECK(set.modes == 2);
    CHECK(set.one_body(0, 0).real() == doctest::Approx(-1.25));
    CHECK(set.one_body(1, 1).real() == doctest::Approx(0.0));
    CHECK(set.one_body(1, 0).real() == doctest::Approx(0.125)); // auto-filled conj
    CHECK(set.two_body.at(0, 1, 1, 0).real() == doctest::Approx(0.5));

    auto bad = write_temp("qsim_ints_bad.txt", "norb 2\n1body\n0 x 1.0\n");
    try {
        load_integrals(bad);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }

    auto conflict = write_temp("qsim_ints_conflict.txt",
                               "norb 2\n1body\n0 1 0.5\n1 0 0.25\n");
    CHECK_THROWS_AS(load_integrals(conflict), std::runtime_error);

    auto headerless = write_temp("qsim_ints_nohdr.txt", "1body\n0 0 1.0\n");
    CHECK_THROWS_AS(load_integrals(headerless), std::runtime_error);

    CHECK_THROWS_AS(load_integrals("/nonexistent/q.txt"), std::runtime_error);
}

TEST_CASE("jordan_wigner: creation operator image") {
    // a1+ on 2 modes = (1/2)(Z (x) X) - (i/2)(Z (x) Y), letters qubit-ordered.
    auto strings = jordan_wigner({{1, true}}, 2);
    REQUIRE(strings.size() == 2);
    Matrix got = strings_dense(strings);
    CHECK((got - oracles::ladder_dagger(1, 2)).cwiseAbs().maxCoeff() < 1e-14);
    for (const auto& s : strings) {
        CHECK(s.letters[0] == 'Z');
        CHECK((s.letters[1] == 'X' || s.letters[1] == 'Y'));
        if (s.letters[1] == 'X') CHECK(s.coefficient == complex(0.5, 0));
        if (s.letters[1] == 'Y') CHECK(s.coefficient == complex(0, -0.5));
    }
}

TEST_CASE("jordan_wigner: number operator is (I - Z)/2") {
    for (int n = 1; n <= 3; ++n)
        for (int j = 0; j < n; ++j) {
            auto strings = jordan_wigner({{j, true}, {j, false}}, n);
            Matrix got = strings_dense(strings);
            std::string letters(static_cast<std::size_t>(n), 'I');
            Matrix id = pauli_string_matrix(letters);
            letters[static_cast<std::size_t>(j)] = 'Z';
            Matrix want = 0.5 * (id - pauli_string_matrix(letters));
            CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);
        }
}

TEST_CASE("jordan_wigner: canonical anticommutation relations on <= 5 modes") {
    const int n = 5;
    std::vector<Matrix> a(n), ad(n);
    for (int j = 0; j < n; ++j) {
        ad[static_cast<std::size_t>(j)] = strings_dense(jordan_wigner({{j, true}}, n));
        a[static_cast<std::size_t>(j)] = strings_dense(jordan_wigner({{j, false}}, n));
    }
    const auto dim = Eigen::Index(1) << n;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            const auto& ap = a[static_cast<std::size_t>(p)];
            const auto& aq = a[static_cast<std::size_t>(q)];
            const auto& adq = ad[static_cast<std::size_t>(q)];
            Matrix anti = ap * aq + aq * ap;
            CHECK(anti.cwiseAbs().maxCoeff() < 1e-12);
            Matrix mixed = ap * adq + adq * ap;
            Matrix want = p == q ? Matrix(Matrix::Identity(dim, dim))
                                 : Matrix(Matrix::Zero(dim, dim));
            CHECK((mixed - want).cwiseAbs().maxCoeff() < 1e-12);
            // Against the occupation-basis oracle as well.
            CHECK((ap - oracles::ladder(p, n)).cwiseAbs().maxCoeff() < 1e-12);
        }
}

TEST_CASE("reduce_to_two_body reproduces the sector spectrum") {
    // Plain one-body matrix: h_pq = 0 means h~ = h.
    rng::Stream rng(71);
    {
        IntegralSet set;
        set.modes = 3;
        set.one_body = Matrix::Zero(3, 3);
        set.two_body = Rank4(3);
        set.two_body.at(0, 1, 1, 0) = 0.7;
        set.two_body.at(0, 1, 1, 0) = 0.7;
        auto reduced = reduce_to_two_body(set, 2);
        CHECK(reduced.at(0, 1, 1, 0) == complex(0.7, 0));
        CHECK_THROWS_AS(reduce_to_two_body(set, 1), std::invalid_argument);
    }

    // Identity resolution: (1/N) sum_s a_s+ a_s acts as I on the N sector.
    {
        const int k = 2, n_elec = 2;
        const auto dim = Eigen::Index(1) << k;
        Matrix sum = Matrix::Zero(dim, dim);
        for (int s = 0; s < k; ++s)
            sum += oracles::ladder_dagger(s, k) * oracles::ladder(s, k);
        Matrix proj = oracles::sector_projector(k, n_elec);
        CHECK(((sum / n_elec) * proj - proj).cwiseAbs().maxCoeff() < 1e-13);
    }

    // Random k=4 integrals, N=2: the reduced two-body Hamiltonian matches the
    // full one- plus two-body Hamiltonian on the 2-particle sector.
    {
        const int k = 4, n_elec = 2;
        IntegralSet set;
        set.modes = k;
        set.one_body = oracles::random_hermitian(rng, k, 1.0);
        set.two_body = Rank4(k);
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q)
                for (int r = 0; r < k; ++r)
                    for (int s = 0; s < k; ++s) {
                        if (set.two_body.at(s, r, q, p) != complex(0.0)) {
                            set.two_body.at(p, q, r, s) =
                                std::conj(set.two_body.at(s, r, q, p));
                        } else {
                            set.two_body.at(p, q, r, s) =
                                complex(rng.normal(), rng.normal()) * 0.3;
                        }
                    }
        // Symmetrize: h_pqrs = conj(h_srqp).
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q)
                for (int r = 0; r < k; ++r)
                    for (int s = 0; s < k; ++s) {
                        const complex v = 0.5 * (set.two_body.at(p, q, r, s) +
                                                 std::conj(set.two_body.at(s, r, q, p)));
                        set.two_body.at(p, q, r, s) = v;
                        set.two_body.at(s, r, q, p) = std::conj(v);
                    }

        const auto dim = Eigen::Index(1) << k;
        Matrix h_full = Matrix::Zero(dim, dim);
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q)
                if (set.one_body(p, q) != complex(0.0))
                    h_full += set.one_body(p, q) * dense_monomial({{p, true}, {q, false}}, k);
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q)
                for (int r = 0; r < k; ++r)
                    for (int s = 0; s < k; ++s)
                        if (set.two_body.at(p, q, r, s) != complex(0.0))
                            h_full += 0.5 * set.two_body.at(p, q, r, s) *
                                      dense_monomial(
                                          {{p, true}, {q, true}, {r, false}, {s, false}}, k);

        auto reduced = reduce_to_two_body(set, n_elec);
        Matrix h_red = Matrix::Zero(dim, dim);
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q)
                for (int r = 0; r < k; ++r)
                    for (int s = 0; s < k; ++s)
                        if (reduced.at(p, q, r, s) != complex(0.0))
                            h_red += 0.5 * reduced.at(p, q, r, s) *
                                     dense_monomial(
                                         {{p, true}, {q, true}, {r, false}, {s, false}}, k);

        const Matrix proj = oracles::sector_projector(k, n_elec);
        Matrix d_full = proj * h_full * proj;
        Matrix d_red = proj * h_red * proj;
        CHECK((d_full - d_red).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("build_qubit_hamiltonian") {
    // All-zero tensor gives the empty Hamiltonian.
    CHECK(build_qubit_hamiltonian(Rank4(2)).strings.empty());

    // Single h_0110 entry: H = 1/2 a0+ a1+ a1 a0 = n0 n1 / 2.
    Rank4 t(2);
    t.at(0, 1, 1, 0) = 1.0;
    auto ham = build_qubit_hamiltonian(t);
    Matrix want = dense_monomial({{0, true}, {1, true}, {1, false}, {0, false}}, 2);
    CHECK((ham.dense() - 0.5 * want).cwiseAbs().maxCoeff() < 1e-12);

    // With its pair-symmetric image h_1001 the half cancels: H = n0 n1.
    t.at(1, 0, 0, 1) = 1.0;
    auto ham2 = build_qubit_hamiltonian(t);
    CHECK((ham2.dense() - want).cwiseAbs().maxCoeff() < 1e-12);

    Rank4 nonherm(2);
    nonherm.at(0, 1, 1, 0) = complex(0, 1.0);
    CHECK_THROWS_AS(build_qubit_hamiltonian(nonherm), std::invalid_argument);
}

TEST_CASE("number conservation of the built Hamiltonian") {
    rng::Stream rng(72);
    const int k = 3;
    Rank4 t(k);
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q)
            for (int r = 0; r < k; ++r)
                for (int s = 0; s < k; ++s)
                    if (t.at(s, r, q, p) == complex(0.0))
                        t.at(p, q, r, s) = complex(rng.normal(), rng.normal()) * 0.4;
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q)
            for (int r = 0; r < k; ++r)
                for (int s = 0; s < k; ++s) {
                    const complex v =
                        0.5 * (t.at(p, q, r, s) + std::conj(t.at(s, r, q, p)));
                    t.at(p, q, r, s) = v;
                    t.at(s, r, q, p) = std::conj(v);
                }
    auto ham = build_qubit_hamiltonian(t);
    const auto dim = Eigen::Index(1) << k;
    Matrix number = Matrix::Zero(dim, dim);
    for (int j = 0; j < k; ++j)
        number += oracles::ladder_dagger(j, k) * oracles::ladder(j, k);
    Matrix comm = ham.dense() * number - number * ham.dense();
    CHECK(comm.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("H2 Hamiltonian reproduces the dense ground energy") {
    auto set = load_integrals(std::filesystem::path(QSIM_DATA_DIR) / "h2_sto3g.txt");
    auto reduced = reduce_to_two_body(set, 2);
    auto ham = build_qubit_hamiltonian(reduced);
    CHECK(ham.n_qubits == 4);

    EigenSystem es(ham.dense());
    // The two-particle sector holds the molecular ground state near -1.851 Eh.
    const Matrix proj = oracles::sector_projector(4, 2);
    Matrix sector = proj * ham.dense() * proj;
    Eigen::SelfAdjointEigenSolver<Matrix> ss(sector, Eigen::EigenvaluesOnly);
    CHECK(ss.eigenvalues().minCoeff() == doctest::Approx(-1.8510462890).epsilon(1e-8));
}

TEST_CASE("evolve_pauli_string") {
    // Z (x) Z phases: e^{-i theta} on even parity, e^{+i theta} on odd.
    const double theta = 0.4;
    PauliString zz{complex(1, 0), "ZZ"};
    StateVector s00 = StateVector::basis_state(2, 0);
    evolve_pauli_string(s00, zz, theta);
    CHECK(std::abs(s00[0] - std::exp(complex(0, -theta))) < 1e-12);

    StateVector s01 = StateVector::basis_state(2, 1);
    evolve_pauli_string(s01, zz, theta);
    CHECK(std::abs(s01[1] - std::exp(complex(0, theta))) < 1e-12);

    // angle 0 is the identity.
    rng::Stream rng(73);
    StateVector psi = oracles::random_state(rng, 3);
    StateVector same = psi;
    evolve_pauli_string(same, PauliString{complex(1, 0), "XYZ"}, 0.0);
    CHECK(fidelity(same, psi) == doctest::Approx(1.0).epsilon(1e-12));

    // X (x) X against the dense exponential.
    PauliString xx{complex(1, 0), "XX"};
    HermitianOperator hxx(2, pauli_string_matrix("XX"));
    for (int t = 0; t < 5; ++t) {
        StateVector a = oracles::random_state(rng, 2);
        StateVector b = a;
        evolve_pauli_string(a, xx, 0.63);
        Vector want = dense_exponential(hxx, complex(0, -0.63)) * b.to_eigen();
        CHECK((a.to_eigen() - want).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("random string evolution matches the dense exponential") {
    rng::Stream rng(74);
    const char letters[] = {'I', 'X', 'Y', 'Z'};
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.index(5)); // up to 6 qubits
        std::string s;
        for (int i = 0; i < n; ++i) s += letters[rng.index(4)];
        const double angle = 2.0 * (rng.uniform() - 0.5);
        PauliString str{complex(1, 0), s};

        StateVector psi = oracles::random_state(rng, n);
        StateVector circuit = psi;
        evolve_pauli_string(circuit, str, angle);
        HermitianOperator hp(n, pauli_string_matrix(s));
        Vector want = dense_exponential(hp, complex(0, -angle)) * psi.to_eigen();
        const double fid =
            std::norm(complex((want.adjoint() * circuit.to_eigen())(0, 0)));
        CHECK(fid >= 1.0 - 1e-10);
    }
}

TEST_CASE("controlled string evolution") {
    rng::Stream rng(75);
    PauliString xz{complex(1, 0), "XZ"};
    const double angle = 0.7;
    // Control |0>: identity on the register.
    StateVector psi = oracles::random_state(rng, 2);
    StateVector ext = attach_register(psi, 1);
    evolve_pauli_string(ext, xz, angle, 2);
    StateVector reg = extract_low_register(ext, 2, 0);
    CHECK(fidelity(reg, psi) == doctest::Approx(1.0).epsilon(1e-12));

    // Control |1>: matches the uncontrolled evolution.
    StateVector on = attach_register(psi, 1);
    {
        auto& amps = on.amplitudes();
        for (std::uint64_t i = 0; i < psi.dim(); ++i) {
            amps[i + psi.dim()] = amps[i];
            amps[i] = 0;
        }
    }
    evolve_pauli_string(on, xz, angle, 2);
    StateVector reg1 = extract_low_register(on, 2, 1);
    StateVector want = psi;
    evolve_pauli_string(want, xz, angle);
    CHECK(fidelity(reg1, want) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("estimate_ground_energy on simple spectra") {
    rng::Stream rng(76);
    // H = Z with trial |1>: energy -1.
    QubitHamiltonian hz;
    hz.n_qubits = 1;
    hz.strings.push_back({complex(1, 0), "Z"});
    auto est = estimate_ground_energy(hz, StateVector::basis_state(1, 1), 8, 0.25, 2, 1, rng);
    CHECK(est.accepted);
    CHECK(std::abs(est.energy - (-1.0)) <= 2.0 * std::pow(2.0, -8) * 2.0);

    // H = Z (x) Z with a Bell trial: outcomes +-1 with probability 1/2 each.
    QubitHamiltonian hzz;
    hzz.n_qubits = 2;
    hzz.strings.push_back({complex(1, 0), "ZZ"});
    auto bell = StateVector::from_amplitudes(
        2, {complex(1 / std::sqrt(2.0), 0), 0, 0, complex(1 / std::sqrt(2.0), 0)});
    // Both Bell components live at energy +1, so the estimate is +1.
    auto est2 = estimate_ground_energy(hzz, bell, 8, 0.25, 2, 1, rng);
    CHECK(est2.accepted);
    CHECK(std::abs(est2.energy - 1.0) <= 2.0 * std::pow(2.0, -8) * 2.0);

    // A mixed-parity trial sees both bands; the target is the lower one.
    auto mixed = StateVector::from_amplitudes(
        2, {complex(std::sqrt(0.5), 0), complex(std::sqrt(0.5), 0), 0, 0});
    auto est3 = estimate_ground_energy(hzz, mixed, 8, 0.25, 2, 1, rng);
    CHECK(est3.accepted);
    CHECK(std::abs(est3.energy - (-1.0)) <= 2.0 * std::pow(2.0, -8) * 2.0);
}

TEST_CASE("estimate_ground_energy flags too-coarse Trotter slicing") {
    // Strongly non-commuting strings at order 1 with one slice: the decoded
    // band moves under slice doubling and the run must refuse.
    QubitHamiltonian ham;
    ham.n_qubits = 2;
    ham.strings.push_back({complex(1, 0), "XX"});
    ham.strings.push_back({complex(1, 0), "ZI"});
    ham.strings.push_back({complex(0.7, 0), "IZ"});
    EigenSystem es(ham.dense());
    StateVector trial = StateVector::from_eigen(2, es.vectors.col(0));
    rng::Stream rng(77);
    CHECK_THROWS_AS(estimate_ground_energy(ham, trial, 10, 0.25, 1, 1, rng),
                    std::runtime_error);
    // Generous slicing clears the check.
    auto est = estimate_ground_energy(ham, trial, 6, 0.25, 2, 64, rng);
    CHECK(est.accepted);
}

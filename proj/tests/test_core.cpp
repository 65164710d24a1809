#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "qsim/core.hpp"

#include <numbers>

using namespace qsim;
using oracles::random_hermitian;
using oracles::random_state;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("basis states") {
    auto s0 = StateVector::basis_state(1, 0);
    CHECK(s0[0] == complex(1, 0));
    CHECK(s0[1] == complex(0, 0));

    auto s3 = StateVector::basis_state(2, 3);
    for (std::uint64_t i = 0; i < 4; ++i)
        CHECK(s3[i] == (i == 3 ? complex(1, 0) : complex(0, 0)));

    auto s5 = StateVector::basis_state(3, 5); // |101>
    CHECK(s5[5] == complex(1, 0));
    CHECK(s5.is_normalized());

    CHECK_THROWS_AS(StateVector::basis_state(2, 4), std::out_of_range);
}

TEST_CASE("standard gates") {
    const Matrix h = gates::h().matrix();
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(h(0, 0) - complex(s, 0)) < 1e-15);
    CHECK(std::abs(h(1, 1) - complex(-s, 0)) < 1e-15);

    const Matrix c = gates::cnot().matrix();
    CHECK(((c * c) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);

    // Rz_phase(0) = |0><0| - i|1><1|
    const Matrix rz0 = gates::rz_phase(0.0).matrix();
    CHECK(std::abs(rz0(0, 0) - complex(1, 0)) < 1e-15);
    CHECK(std::abs(rz0(1, 1) - complex(0, -1)) < 1e-15);

    // Rx(theta) = exp(-i X theta / 2), checked against the dense oracle.
    const double theta = 0.7316;
    HermitianOperator xop(1, pauli('X'));
    const Matrix want = dense_exponential(xop, complex(0, -theta / 2));
    CHECK((gates::rx(theta).matrix() - want).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(standard_gate("Q"), std::invalid_argument);
    const double bad[] = {std::nan("")};
    CHECK_THROWS_AS(standard_gate("Rx", bad), std::invalid_argument);

    // Dispatcher covers the documented set.
    for (const char* name : {"H", "X", "Y", "Z", "CNOT"}) CHECK_NOTHROW(standard_gate(name));
    const double p1[] = {0.3};
    CHECK_NOTHROW(standard_gate("Rx", p1));
    CHECK_NOTHROW(standard_gate("Ry", p1));
    CHECK_NOTHROW(standard_gate("Rz_phase", p1));
    const double pk[] = {3.0};
    CHECK_NOTHROW(standard_gate("R_k", pk));
}

TEST_CASE("gate unitarity invariant") {
    rng::Stream rng(41);
    for (int i = 0; i < 50; ++i) {
        const double theta = 4 * kPi * (rng.uniform() - 0.5);
        for (const auto& g : {gates::rx(theta), gates::ry(theta), gates::rz(theta),
                              gates::rz_phase(theta), gates::phase(theta)}) {
            const Matrix gram = g.matrix().adjoint() * g.matrix();
            CHECK((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("apply_unitary basics") {
    StateVector psi(1);
    const int q0[] = {0};
    apply_unitary(psi, gates::h(), q0);
    CHECK(std::abs(psi[0] - complex(1 / std::sqrt(2.0), 0)) < 1e-15);
    CHECK(std::abs(psi[1] - complex(1 / std::sqrt(2.0), 0)) < 1e-15);

    // H then CNOT makes the Bell state.
    StateVector bell(2);
    apply_unitary(bell, gates::h(), q0);
    const int t1[] = {1};
    apply_unitary(bell, gates::x().matrix(), t1, q0);
    auto target = StateVector::from_amplitudes(
        2, {complex(1 / std::sqrt(2.0), 0), 0, 0, complex(1 / std::sqrt(2.0), 0)});
    CHECK(fidelity(bell, target) == doctest::Approx(1.0).epsilon(1e-12));

    // Control in |0>: state unchanged.
    StateVector idle = StateVector::basis_state(2, 0);
    apply_unitary(idle, gates::x().matrix(), t1, q0);
    CHECK(std::abs(idle[0] - complex(1, 0)) < 1e-15);

    // Errors: overlap and arity mismatch.
    StateVector s3(3);
    const int overlap[] = {1};
    CHECK_THROWS_AS(apply_unitary(s3, gates::x().matrix(), overlap, overlap),
                    std::invalid_argument);
    const int two[] = {0, 1};
    CHECK_THROWS_AS(apply_unitary(s3, gates::x().matrix(), two), std::invalid_argument);
}

TEST_CASE("apply_unitary agrees with dense embedding on random circuits") {
    rng::Stream rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4;
        StateVector psi = random_state(rng, n);
        Vector dense = psi.to_eigen();

        const int a = static_cast<int>(rng.index(n));
        int b = static_cast<int>(rng.index(n));
        while (b == a) b = static_cast<int>(rng.index(n));

        const Matrix u = EigenSystem(random_hermitian(rng, 4)).exponential(complex(0, -1));
        const int targets[] = {a, b};
        apply_unitary(psi, u, targets);
        dense = embed(u, targets, n) * dense;
        CHECK((psi.to_eigen() - dense).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("norm preservation over long gate sequences") {
    rng::Stream rng(11);
    const int n = 10;
    StateVector psi = random_state(rng, n);
    for (int step = 0; step < 1000; ++step) {
        const int q = static_cast<int>(rng.index(n));
        const int tq[] = {q};
        switch (rng.index(4)) {
            case 0: apply_unitary(psi, gates::h(), tq); break;
            case 1: apply_unitary(psi, gates::rx(rng.uniform() * kPi), tq); break;
            case 2: apply_unitary(psi, gates::rz(rng.uniform() * kPi), tq); break;
            default: {
                int c = static_cast<int>(rng.index(n));
                if (c == q) c = (q + 1) % n;
                const int cq[] = {c};
                apply_unitary(psi, gates::x().matrix(), tq, cq);
            }
        }
    }
    CHECK(std::abs(psi.norm_sq() - 1.0) < 1e-9);
}

TEST_CASE("measure_qubit") {
    StateVector zero = StateVector::basis_state(1, 0);
    auto r = measure_qubit(zero, 0, 0.5);
    CHECK(r.outcome == 0);
    CHECK(r.probability == doctest::Approx(1.0));

    StateVector plus(1);
    const int q0[] = {0};
    apply_unitary(plus, gates::h(), q0);
    StateVector plus2 = plus;
    auto r0 = measure_qubit(plus, 0, 0.25);
    CHECK(r0.outcome == 0);
    CHECK(r0.probability == doctest::Approx(0.5));
    auto r1 = measure_qubit(plus2, 0, 0.75);
    CHECK(r1.outcome == 1);
    CHECK(r1.probability == doctest::Approx(0.5));

    // Bell correlation: measuring qubit 1 as 1 collapses to |11>.
    auto bell = StateVector::from_amplitudes(
        2, {complex(1 / std::sqrt(2.0), 0), 0, 0, complex(1 / std::sqrt(2.0), 0)});
    auto rb = measure_qubit(bell, 1, 0.9);
    CHECK(rb.outcome == 1);
    CHECK(std::abs(bell[3] - complex(1, 0)) < 1e-12);
}

TEST_CASE("measurement completeness") {
    rng::Stream rng(5);
    for (int t = 0; t < 50; ++t) {
        StateVector psi = random_state(rng, 4);
        const int q = static_cast<int>(rng.index(4));
        StateVector a = psi, b = psi;
        auto r0 = measure_qubit(a, q, 0.0);
        double p0 = r0.outcome == 0 ? r0.probability : 1 - r0.probability;
        auto r1 = measure_qubit(b, q, 1.0 - 1e-12);
        double p1 = r1.outcome == 1 ? r1.probability : 1 - r1.probability;
        CHECK(std::abs(p0 + p1 - 1.0) < 1e-12);
    }
}

TEST_CASE("expectation values") {
    HermitianOperator sz(1, pauli('Z'));
    CHECK(expectation_value(StateVector::basis_state(1, 0), sz) == doctest::Approx(1.0));

    StateVector plus(1);
    const int q0[] = {0};
    apply_unitary(plus, gates::h(), q0);
    CHECK(std::abs(expectation_value(plus, sz)) < 1e-12);

    CHECK(std::abs(expectation_value(DensityMatrix::maximally_mixed(1), sz)) < 1e-12);

    HermitianOperator big(2, pauli_string_matrix("ZZ"));
    CHECK_THROWS_AS(expectation_value(plus, big), std::invalid_argument);
}

TEST_CASE("state metrics") {
    auto s0 = StateVector::basis_state(1, 0);
    auto s1 = StateVector::basis_state(1, 1);
    auto m00 = state_metrics(s0, s0);
    CHECK(m00.fidelity == doctest::Approx(1.0));
    CHECK(m00.trace_distance == doctest::Approx(0.0));

    auto m01 = state_metrics(s0, s1);
    CHECK(m01.fidelity == doctest::Approx(0.0));
    CHECK(m01.trace_distance == doctest::Approx(1.0));

    StateVector plus(1);
    const int q0[] = {0};
    apply_unitary(plus, gates::h(), q0);
    CHECK(state_metrics(s0, plus).fidelity == doctest::Approx(0.5));

    // Pure-state trace distance agrees with the density-matrix route.
    auto dm = state_metrics(DensityMatrix::from_pure(s0), DensityMatrix::from_pure(plus));
    CHECK(dm.trace_distance ==
          doctest::Approx(state_metrics(s0, plus).trace_distance).epsilon(1e-10));
    CHECK(dm.fidelity == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("dense exponential") {
    HermitianOperator sz(1, pauli('Z'));
    CHECK((dense_exponential(sz, complex(0, 0)) - Matrix::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-14);

    const double t = 0.83;
    Matrix d = dense_exponential(sz, complex(0, -t));
    CHECK(std::abs(d(0, 0) - std::exp(complex(0, -t))) < 1e-13);
    CHECK(std::abs(d(1, 1) - std::exp(complex(0, t))) < 1e-13);

    // exp(-i X pi/2) = -i X.
    HermitianOperator sx(1, pauli('X'));
    Matrix e = dense_exponential(sx, complex(0, -kPi / 2));
    CHECK((e - complex(0, -1) * pauli('X')).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("oracle consistency: half-time composition") {
    rng::Stream rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix h = random_hermitian(rng, 8, 2.0);
        HermitianOperator op(3, h);
        const double t = 0.4 + rng.uniform();
        const Matrix full = dense_exponential(op, complex(0, -t));
        const Matrix half = dense_exponential(op, complex(0, -t / 2));
        CHECK((full - half * half).cwiseAbs().maxCoeff() < 1e-10);
        // Unitarity of the evolution operator.
        CHECK((full.adjoint() * full - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("embed matches kron layout") {
    // Qubit 0 is the least-significant index bit, so an operator on qubit 1
    // of two sits as op (x) I in matrix form.
    const Matrix x = pauli('X');
    const int support1[] = {1};
    CHECK((embed(x, support1, 2) - kron(x, Matrix::Identity(2, 2))).cwiseAbs().maxCoeff() <
          1e-15);
    const int support0[] = {0};
    CHECK((embed(x, support0, 2) - kron(Matrix::Identity(2, 2), x)).cwiseAbs().maxCoeff() <
          1e-15);
    CHECK((pauli_string_matrix("XZ") - kron(pauli('Z'), pauli('X'))).cwiseAbs().maxCoeff() <
          1e-15);
}

TEST_CASE("density matrix validation") {
    auto rho = DensityMatrix::maximally_mixed(2);
    CHECK_NOTHROW(rho.validate());
    Matrix bad = rho.entries();
    bad(0, 0) += 0.5;
    CHECK_THROWS(DensityMatrix(2, bad).validate());
}

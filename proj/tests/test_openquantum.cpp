#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "qsim/openquantum.hpp"

using namespace qsim;
using namespace qsim::openquantum;

namespace {

LindbladModel dephasing_model(double rate) {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = rate;
    return make_model(HermitianOperator(1, Matrix::Zero(2, 2)), m,
                      {pauli('Z') / std::sqrt(2.0)});
}

LindbladModel damping_model(double h_scale, double rate) {
    Matrix sminus(2, 2);
    sminus << 0, 0, 1, 0;
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = rate;
    return make_model(HermitianOperator(1, h_scale * (0.9 * pauli('X') + 0.4 * pauli('Z'))),
                      m, {sminus});
}

} // namespace

TEST_CASE("model validation") {
    Eigen::MatrixXcd neg(1, 1);
    neg(0, 0) = -0.1;
    CHECK_THROWS_AS(make_model(HermitianOperator(1, Matrix::Zero(2, 2)), neg,
                               {pauli('Z')}),
                    std::invalid_argument);
    Eigen::MatrixXcd ok(1, 1);
    ok(0, 0) = 0.5;
    CHECK_THROWS_AS(make_model(HermitianOperator(1, Matrix::Zero(2, 2)), ok,
                               {Matrix::Identity(2, 2)}),
                    std::invalid_argument); // not traceless
}

TEST_CASE("pure commutator generator reproduces unitary conjugation") {
    rng::Stream rng(111);
    HermitianOperator h(1, oracles::random_hermitian(rng, 2, 1.0));
    auto model = make_model(h, Eigen::MatrixXcd::Zero(0, 0), {});
    StateVector psi = oracles::random_state(rng, 1);
    auto rho0 = DensityMatrix::from_pure(psi);
    const double t = 1.3;
    auto rho_t = propagate_exact(model, rho0, t);
    const Matrix u = dense_exponential(h, complex(0, -t));
    Matrix want = u * rho0.entries() * u.adjoint();
    CHECK((rho_t.entries() - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dephasing decays coherences and fixes populations") {
    const double rate = 0.8;
    auto model = dephasing_model(rate);
    StateVector plus(1);
    const int q0[] = {0};
    apply_unitary(plus, gates::h(), q0);
    auto rho0 = DensityMatrix::from_pure(plus);

    // Populations constant, trace exactly preserved.
    double prev_coh = 1.0;
    for (double t : {0.1, 1.0, 10.0}) {
        auto rho = propagate_exact(model, rho0, t);
        CHECK(std::abs(rho.entries().trace().real() - 1.0) < 1e-12);
        CHECK(rho.entries()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(rho.entries()(1, 1).real() == doctest::Approx(0.5).epsilon(1e-10));
        const double coh = std::abs(rho.entries()(0, 1));
        CHECK(coh < prev_coh);
        prev_coh = coh;
    }

    // Exponential decay rate measured numerically from two times.
    auto c1 = std::abs(propagate_exact(model, rho0, 0.5).entries()(0, 1));
    auto c2 = std::abs(propagate_exact(model, rho0, 1.0).entries()(0, 1));
    const double measured = std::log(c1 / c2) / 0.5;
    // Second sample confirms a single exponential.
    auto c3 = std::abs(propagate_exact(model, rho0, 1.5).entries()(0, 1));
    CHECK(std::log(c2 / c3) / 0.5 == doctest::Approx(measured).epsilon(1e-8));

    // Diagonal states are exactly stationary under pure dephasing.
    auto diag = DensityMatrix(1, Matrix(Eigen::Vector2cd(0.3, 0.7).asDiagonal()));
    auto evolved = propagate_exact(model, diag, 2.0);
    CHECK((evolved.entries() - diag.entries()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lindbladian of the maximally mixed state is traceless") {
    auto model = dephasing_model(0.5);
    Matrix gen = build_lindbladian(model);
    Matrix rho = 0.5 * Matrix::Identity(2, 2);
    Matrix drho = unvectorize(gen * vectorize(rho), 2);
    CHECK(std::abs(drho.trace()) < 1e-14);
}

TEST_CASE("propagate_exact basics") {
    auto model = damping_model(1.0, 0.4);
    rng::Stream rng(112);
    auto rho0 = DensityMatrix::from_pure(oracles::random_state(rng, 1));
    auto same = propagate_exact(model, rho0, 0.0);
    CHECK((same.entries() - rho0.entries()).cwiseAbs().maxCoeff() < 1e-12);

    auto later = propagate_exact(model, rho0, 2.0);
    CHECK_NOTHROW(later.validate(1e-9, 1e-9, 1e-9));
}

TEST_CASE("channel properties: trace preservation and complete positivity") {
    for (double t : {0.1, 0.7, 2.0}) {
        auto ch = exact_channel(damping_model(1.0, 0.6), t);
        CHECK(ch.is_trace_preserving(1e-10));
        CHECK(ch.min_choi_eigenvalue() >= -1e-8);
    }
}

TEST_CASE("trotterized channel: exact cases") {
    auto model = damping_model(1.0, 0.5);
    // A single generator splits exactly.
    std::vector<LindbladModel> single = {model};
    auto split = trotterized_channel(single, 0.25, 4);
    auto exact = exact_channel(model, 1.0);
    CHECK(spectral_norm(split.k - exact.k) < 1e-10);

    // Dephasing on disjoint qubits commutes: split is exact.
    Matrix z0 = kron(Matrix::Identity(2, 2), pauli('Z')) / std::sqrt(2.0);
    Matrix z1 = kron(pauli('Z'), Matrix::Identity(2, 2)) / std::sqrt(2.0);
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = 0.7;
    auto m0 = make_model(HermitianOperator(2, Matrix::Zero(4, 4)), m, {z0});
    auto m1 = make_model(HermitianOperator(2, Matrix::Zero(4, 4)), m, {z1});
    std::vector<LindbladModel> both = {m0, m1};
    auto split2 = trotterized_channel(both, 0.5, 2);

    Eigen::MatrixXcd m2(2, 2);
    m2.setZero();
    m2(0, 0) = 0.7;
    m2(1, 1) = 0.7;
    auto joint = make_model(HermitianOperator(2, Matrix::Zero(4, 4)), m2, {z0, z1});
    auto exact2 = exact_channel(joint, 1.0);
    CHECK(spectral_norm(split2.k - exact2.k) < 1e-10);
}

TEST_CASE("hamiltonian/dissipator split converges at first order") {
    auto full = damping_model(1.0, 0.6);
    auto h_only = make_model(full.h_s, Eigen::MatrixXcd::Zero(0, 0), {});
    auto d_only = make_model(HermitianOperator(1, Matrix::Zero(2, 2)), full.rates,
                             full.lindblad_ops);
    const double total = 0.8;
    auto exact = exact_channel(full, total);

    std::vector<double> dts, dist;
    for (int steps : {2, 4, 8, 16, 32}) {
        std::vector<LindbladModel> parts = {h_only, d_only};
        auto split = trotterized_channel(parts, total / steps, steps);
        CHECK(split.is_trace_preserving(1e-12));
        CHECK(split.min_choi_eigenvalue() >= -1e-8);
        dts.push_back(total / steps);
        dist.push_back(spectral_norm(split.k - exact.k));
    }
    for (std::size_t i = 1; i < dist.size(); ++i) CHECK(dist[i] < dist[i - 1] * 1.05);
    const double slope = oracles::loglog_slope(dts, dist);
    CHECK(slope > 0.8);
    CHECK(slope < 1.2);

    // The symmetric option is at least as accurate.
    std::vector<LindbladModel> parts = {h_only, d_only};
    auto strang = trotterized_channel(parts, total / 8, 8, true);
    auto plain = trotterized_channel(parts, total / 8, 8, false);
    CHECK(spectral_norm(strang.k - exact.k) <= spectral_norm(plain.k - exact.k));
}

TEST_CASE("dimension mismatch is rejected") {
    auto one_qubit = dephasing_model(0.3);
    Matrix z0 = kron(Matrix::Identity(2, 2), pauli('Z'));
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = 0.3;
    auto two_qubit = make_model(HermitianOperator(2, Matrix::Zero(4, 4)), m, {z0});
    std::vector<LindbladModel> bad = {one_qubit, two_qubit};
    CHECK_THROWS_AS(trotterized_channel(bad, 0.1, 1), std::invalid_argument);
}

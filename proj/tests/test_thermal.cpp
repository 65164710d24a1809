#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "qsim/thermal.hpp"

using namespace qsim;
using namespace qsim::thermal;

TEST_CASE("exact thermal states") {
    HermitianOperator hz(1, pauli('Z'));

    // Infinite temperature: maximally mixed.
    auto infinite = exact_thermal(hz, 0.0);
    CHECK((infinite.rho.entries() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-14);

    // beta ||H|| = 50: ground-state projector for a gapped Hamiltonian.
    auto cold = exact_thermal(hz, 50.0);
    Matrix proj = Matrix::Zero(2, 2);
    proj(1, 1) = 1.0; // ground of sigma_z is |1>
    CHECK((cold.rho.entries() - proj).cwiseAbs().maxCoeff() < 1e-10);

    // Closed form at beta = 1.
    auto warm = exact_thermal(hz, 1.0);
    const double z = std::exp(1.0) + std::exp(-1.0);
    CHECK(warm.rho.entries()(0, 0).real() == doctest::Approx(std::exp(-1.0) / z));
    CHECK(warm.rho.entries()(1, 1).real() == doctest::Approx(std::exp(1.0) / z));
    CHECK_NOTHROW(warm.rho.validate());

    // Gibbs state commutes with its Hamiltonian.
    rng::Stream rng(91);
    HermitianOperator h(2, oracles::random_hermitian(rng, 4, 1.3));
    auto ctx = exact_thermal(h, 0.7);
    Matrix comm = ctx.rho.entries() * h.matrix() - h.matrix() * ctx.rho.entries();
    CHECK(comm.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("product initialization") {
    rng::Stream rng(92);
    HermitianOperator h1(1, oracles::random_hermitian(rng, 2));
    HermitianOperator h2(1, oracles::random_hermitian(rng, 2));
    const double beta = 1.4;
    Matrix htot = kron(Matrix::Identity(2, 2), h1.matrix()) +
                  kron(h2.matrix(), Matrix::Identity(2, 2));
    auto joint = exact_thermal(HermitianOperator(2, htot), beta);
    Matrix prod = kron(exact_thermal(h2, beta).rho.entries(),
                       exact_thermal(h1, beta).rho.entries());
    CHECK((joint.rho.entries() - prod).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("perturbative update: trivial and commuting cases") {
    HermitianOperator hz(1, pauli('Z'));
    auto ctx = exact_thermal(hz, 1.0);

    // h = 0: nothing changes and both successes are 1.
    auto out = perturbative_update(ctx, HermitianOperator(1, Matrix::Zero(2, 2)), 0.05);
    CHECK(out.exact_success == doctest::Approx(1.0));
    CHECK(out.first_order_success == doctest::Approx(1.0));
    CHECK(trace_distance(out.rho_next, exact_thermal(hz, 1.0).rho) < 1e-12);

    // Commuting perturbation: one step lands O(eps^2) from the target Gibbs.
    auto commuting_err = [&](double eps) {
        auto c = exact_thermal(hz, 1.0);
        auto o = perturbative_update(c, HermitianOperator(1, 0.8 * pauli('Z')), eps);
        Matrix target = exact_thermal(HermitianOperator(1, (1.0 + 0.8 * eps) * pauli('Z')), 1.0)
                            .rho.entries();
        return trace_distance(o.rho_next, DensityMatrix(1, target));
    };
    const double e1 = commuting_err(0.1);
    const double e2 = commuting_err(0.05);
    CHECK(e1 / e2 > 2.5); // quadratic shrinkage, allow slack
    CHECK(e1 < 2e-3);
}

TEST_CASE("perturbative update: O(eps^2) accuracy on random instances") {
    rng::Stream rng(93);
    for (int trial = 0; trial < 5; ++trial) {
        HermitianOperator h(2, oracles::random_hermitian(rng, 4, 1.0));
        HermitianOperator hp(2, oracles::random_hermitian(rng, 4, 1.0));
        const double beta = 1.0;
        auto dist_at = [&](double eps) {
            auto ctx = exact_thermal(h, beta);
            auto out = perturbative_update(ctx, hp, eps);
            Matrix target =
                exact_thermal(HermitianOperator(2, h.matrix() + eps * hp.matrix()), beta)
                    .rho.entries();
            return trace_distance(out.rho_next, DensityMatrix(2, target));
        };
        const double d1 = dist_at(0.05);
        const double d2 = dist_at(0.025);
        const double ratio = (d1 / (0.05 * 0.05)) / (d2 / (0.025 * 0.025));
        CHECK(ratio > 0.5);
        CHECK(ratio < 2.0);
    }
}

TEST_CASE("success probabilities stay in (0, 1] and match to first order") {
    rng::Stream rng(94);
    for (int trial = 0; trial < 10; ++trial) {
        HermitianOperator h(2, oracles::random_hermitian(rng, 4, 1.0));
        HermitianOperator hp(2, oracles::random_hermitian(rng, 4, 1.0));
        auto gap_at = [&](double eps) {
            auto ctx = exact_thermal(h, 1.0);
            auto out = perturbative_update(ctx, hp, eps);
            CHECK(out.exact_success > 0.0);
            CHECK(out.exact_success <= 1.0 + 1e-12);
            CHECK(out.first_order_success > 0.0);
            CHECK(out.first_order_success <= 1.0 + 1e-12);
            return std::abs(out.exact_success - out.first_order_success);
        };
        const double g1 = gap_at(0.08);
        const double g2 = gap_at(0.04);
        const double c1 = g1 / (0.08 * 0.08), c2 = g2 / (0.04 * 0.04);
        CHECK(c1 / c2 < 2.0);
        CHECK(c2 / c1 < 2.0);
    }
}

TEST_CASE("dephasing fixed point") {
    rng::Stream rng(95);
    HermitianOperator h(2, oracles::random_hermitian(rng, 4, 1.0));
    auto ctx = exact_thermal(h, 2.0);
    const Matrix before = ctx.rho.entries();
    // Zero perturbation: the map is the identity plus dephasing in the
    // eigenbasis of H itself, which fixes the Gibbs state.
    auto out = perturbative_update(ctx, HermitianOperator(2, Matrix::Zero(4, 4)), 0.3);
    CHECK((out.rho_next.entries() - before).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("step-size precondition") {
    HermitianOperator hz(1, pauli('Z'));
    auto ctx = exact_thermal(hz, 10.0);
    // eps * beta * ||h_shifted|| = 0.2 * 10 * 2 = 4 >= 1.
    CHECK_THROWS_AS(perturbative_update(ctx, HermitianOperator(1, pauli('X')), 0.2),
                    std::invalid_argument);
}

TEST_CASE("chain update builds the composite Gibbs state") {
    HermitianOperator h1(1, pauli('X'));
    HermitianOperator h2(1, pauli('X'));
    const Matrix coupling = 0.5 * pauli_string_matrix("ZZ");

    // Zero coupling: the chain is a no-op on the product state.
    auto trivial = chain_update(h1, h2, Matrix::Zero(4, 4), 1.0, 0.25);
    Matrix prod = kron(exact_thermal(h2, 1.0).rho.entries(),
                       exact_thermal(h1, 1.0).rho.entries());
    CHECK(trace_distance(trivial.rho, DensityMatrix(2, prod)) < 1e-12);
    CHECK(trivial.cumulative_success == doctest::Approx(1.0));

    auto chain = chain_update(h1, h2, coupling, 1.0, 0.01);
    Matrix htot = kron(Matrix::Identity(2, 2), h1.matrix()) +
                  kron(h2.matrix(), Matrix::Identity(2, 2)) + coupling;
    auto target = exact_thermal(HermitianOperator(2, htot), 1.0);
    CHECK(trace_distance(chain.rho, target.rho) <= 0.01);
    CHECK(chain.log.size() == 100);
    for (const auto& st : chain.log) {
        CHECK(st.exact_success > 0.0);
        CHECK(st.exact_success <= 1.0 + 1e-12);
    }
}

TEST_CASE("cumulative success decreases in beta when Tr(rho h) > 0") {
    // Diagonal subsystems with aligned coupling: <ZZ> = tanh(beta)^2 > 0.
    HermitianOperator h1(1, pauli('Z'));
    HermitianOperator h2(1, pauli('Z'));
    const Matrix coupling = 0.5 * pauli_string_matrix("ZZ");
    double prev = 2.0;
    for (double beta : {0.4, 0.8, 1.2, 1.6}) {
        auto chain = chain_update(h1, h2, coupling, beta, 0.05);
        CHECK(chain.cumulative_success < prev);
        prev = chain.cumulative_success;
    }
}

TEST_CASE("monte-carlo chain restarts and reports cost") {
    HermitianOperator h1(1, pauli('Z'));
    HermitianOperator h2(1, pauli('Z'));
    const Matrix coupling = 0.9 * pauli_string_matrix("ZZ");
    rng::Stream mc(96);
    auto chain = chain_update(h1, h2, coupling, 2.0, 0.05, &mc);
    CHECK(chain.total_steps >= static_cast<long>(chain.log.size()));
    Matrix htot = kron(Matrix::Identity(2, 2), h1.matrix()) +
                  kron(h2.matrix(), Matrix::Identity(2, 2)) + coupling;
    auto target = exact_thermal(HermitianOperator(2, htot), 2.0);
    CHECK(trace_distance(chain.rho, target.rho) <= 0.06);

    CHECK_THROWS_AS(chain_update(h1, h2, coupling, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("trace-norm bound: pinned examples") {
    // h = 0: both sides vanish.
    HermitianOperator hz(1, pauli('Z'));
    auto zero = verify_trace_norm_bound(hz, HermitianOperator(1, Matrix::Zero(2, 2)),
                                        0.1, 1.0);
    CHECK(zero.lhs < 1e-14);
    CHECK(zero.dyson_lhs < 1e-14);

    // H = sigma_z, h = sigma_x, eps = 0.1, beta = 1: bound 0.1.
    auto chk = verify_trace_norm_bound(hz, HermitianOperator(1, pauli('X')), 0.1, 1.0);
    CHECK(chk.rhs == doctest::Approx(0.1));
    CHECK(chk.lhs <= chk.rhs + 1e-10);
    CHECK(chk.dyson_lhs <= chk.rhs + 1e-10);
}

TEST_CASE("trace-norm bound: randomized sweep") {
    rng::Stream rng(97);
    for (int draw = 0; draw < 25; ++draw) {
        const int n = 1 + static_cast<int>(rng.index(3));
        const auto dim = Eigen::Index(1) << n;
        HermitianOperator h(n, oracles::random_hermitian(rng, dim, 1.5));
        HermitianOperator hp(n, oracles::random_hermitian(rng, dim, 1.0));
        for (double beta : {0.1, 1.0, 10.0})
            for (double eps : {0.01, 0.1}) {
                auto chk = verify_trace_norm_bound(h, hp, eps, beta);
                CHECK(chk.lhs <= chk.rhs + 1e-10);
                CHECK(chk.dyson_lhs <= chk.rhs + 1e-10);
            }
    }
}

TEST_CASE("dyson quadrature agrees with the closed-form eigenbasis integral") {
    rng::Stream rng(98);
    HermitianOperator h(2, oracles::random_hermitian(rng, 4, 1.0));
    HermitianOperator hp(2, oracles::random_hermitian(rng, 4, 1.0));
    const double beta = 1.7, eps = 0.05;
    auto chk = verify_trace_norm_bound(h, hp, eps, beta);

    // Closed form: in the eigenbasis of H the integrand integrates entrywise
    // to the log-mean of Boltzmann weights.
    EigenSystem es(h.matrix());
    const Eigen::Index d = es.values.size();
    Eigen::VectorXd w(d);
    const double shift = es.values.minCoeff();
    double z = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        w(i) = std::exp(-beta * (es.values(i) - shift));
        z += w(i);
    }
    Matrix ht = es.vectors.adjoint() * hp.matrix() * es.vectors;
    Matrix integral(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            const double de = es.values(i) - es.values(j);
            integral(i, j) = std::abs(de) < 1e-13
                                 ? ht(i, j) * w(i)
                                 : ht(i, j) * (w(j) - w(i)) / (beta * de);
        }
    integral = es.vectors * integral * es.vectors.adjoint();
    const double want = eps * beta * trace_norm(integral) / z;
    CHECK(chk.dyson_lhs == doctest::Approx(want).epsilon(1e-7));
}

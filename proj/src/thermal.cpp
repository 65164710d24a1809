#include "qsim/thermal.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace qsim::thermal {

ThermalContext exact_thermal(const HermitianOperator& h, double beta) {
    if (h.n_qubits() > 10)
        throw std::invalid_argument("exact_thermal guarded to <= 10 qubits");
    EigenSystem es(h.matrix());
    const double shift = es.values.minCoeff();
    Eigen::VectorXd w(es.values.size());
    double z = 0.0;
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
        w(i) = std::exp(-beta * (es.values(i) - shift));
        z += w(i);
    }
    Matrix rho = es.vectors * (w / z).asDiagonal() * es.vectors.adjoint();
    rho = 0.5 * (rho + Matrix(rho.adjoint())); // scrub roundoff asymmetry
    return {h, beta, DensityMatrix(h.n_qubits(), rho)};
}

namespace {

Matrix dephase_in_basis(const Matrix& rho, const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
    Matrix r = es.eigenvectors().adjoint() * rho * es.eigenvectors();
    Matrix diag = Matrix::Zero(r.rows(), r.cols());
    diag.diagonal() = r.diagonal().real().cast<complex>();
    return es.eigenvectors() * diag * es.eigenvectors().adjoint();
}

} // namespace

UpdateOutcome perturbative_update(ThermalContext& ctx, const HermitianOperator& h_pert,
                                  double eps) {
    if (h_pert.n_qubits() != ctx.h.n_qubits())
        throw std::invalid_argument("perturbation dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> ep(h_pert.matrix(), Eigen::EigenvaluesOnly);
    const double lam_min = ep.eigenvalues().minCoeff();
    const double lam_max = ep.eigenvalues().maxCoeff();
    const Matrix shifted =
        h_pert.matrix() - lam_min * Matrix::Identity(h_pert.matrix().rows(),
                                                     h_pert.matrix().cols());
    const double shifted_norm = lam_max - lam_min;
    if (!(eps * ctx.beta * shifted_norm < 1.0))
        throw std::invalid_argument(
            "step size violates eps * beta * ||h_shifted|| < 1");

    const Matrix k = Matrix::Identity(shifted.rows(), shifted.cols()) -
                     (eps * ctx.beta / 2.0) * shifted;
    const Matrix& rho = ctx.rho.entries();
    Matrix mapped = k * rho * k;
    const double exact_success = mapped.trace().real();
    const double first_order =
        1.0 - eps * ctx.beta * (rho * shifted).trace().real();
    mapped /= exact_success;

    const Matrix h_next = ctx.h.matrix() + eps * h_pert.matrix();
    Matrix next = dephase_in_basis(mapped, h_next);
    next = 0.5 * (next + Matrix(next.adjoint()));

    ctx.h = HermitianOperator(ctx.h.n_qubits(), h_next);
    ctx.rho = DensityMatrix(ctx.h.n_qubits(), next);
    return {ctx.rho, exact_success, first_order};
}

ChainResult chain_update(const HermitianOperator& h1, const HermitianOperator& h2,
                         const Matrix& coupling, double beta, double eps,
                         rng::Stream* mc, int max_restarts) {
    if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("eps must lie in (0, 1]");
    const int n1 = h1.n_qubits(), n2 = h2.n_qubits();
    const int n = n1 + n2;
    const auto d1 = Eigen::Index(1) << n1;
    const auto d2 = Eigen::Index(1) << n2;
    if (coupling.rows() != d1 * d2)
        throw std::invalid_argument("coupling must act on the composite register");

    // Composite layout: subsystem 1 on the low qubits, so H1 is the right
    // Kronecker factor.
    const Matrix h_comp = kron(Matrix::Identity(d2, d2), h1.matrix()) +
                          kron(h2.matrix(), Matrix::Identity(d1, d1));

    auto initial = [&]() {
        ThermalContext ctx;
        ctx.beta = beta;
        ctx.h = HermitianOperator(n, h_comp);
        Matrix rho = kron(exact_thermal(h2, beta).rho.entries(),
                          exact_thermal(h1, beta).rho.entries());
        ctx.rho = DensityMatrix(n, rho);
        return ctx;
    };

    const int steps = static_cast<int>(std::ceil(1.0 / eps));
    const double eps_eff = 1.0 / steps;
    const HermitianOperator h_step(n, coupling);

    ChainResult result;
    int restarts = 0;
    while (true) {
        ThermalContext ctx = initial();
        result.log.clear();
        result.cumulative_success = 1.0;
        bool failed = false;
        for (int kstep = 0; kstep < steps; ++kstep) {
            auto out = perturbative_update(ctx, h_step, eps_eff);
            result.log.push_back({out.exact_success, out.first_order_success});
            result.cumulative_success *= out.exact_success;
            ++result.total_steps;
            if (mc && mc->uniform() >= out.exact_success) {
                failed = true;
                break;
            }
        }
        if (!failed) {
            result.rho = ctx.rho;
            result.restarts = restarts;
            return result;
        }
        if (++restarts > max_restarts)
            throw std::runtime_error("chain update exceeded the restart budget");
    }
}

namespace {

struct GibbsParts {
    EigenSystem es;
    double shift;
    double z;

    explicit GibbsParts(const Matrix& h, double beta) : es(h), shift(es.values.minCoeff()) {
        z = 0.0;
        for (Eigen::Index i = 0; i < es.values.size(); ++i)
            z += std::exp(-beta * (es.values(i) - shift));
    }

    // e^{-beta H lambda} relative to the shifted spectrum.
    Matrix propagator(double beta, double lambda) const {
        Vector d(es.values.size());
        for (Eigen::Index i = 0; i < es.values.size(); ++i)
            d(i) = std::exp(-beta * (es.values(i) - shift) * lambda);
        return es.vectors * d.asDiagonal() * es.vectors.adjoint();
    }
};

Matrix dyson_integrand(const GibbsParts& g, const Matrix& pert, double beta,
                       double lambda) {
    return g.propagator(beta, 1.0 - lambda) * pert * g.propagator(beta, lambda);
}

void adaptive_simpson(const std::function<Matrix(double)>& f, double a, double b,
                      const Matrix& fa, const Matrix& fm, const Matrix& fb,
                      const Matrix& whole, double tol, int depth, Matrix& acc) {
    const double m = 0.5 * (a + b);
    const Matrix fl = f(0.5 * (a + m));
    const Matrix fr = f(0.5 * (m + b));
    const Matrix left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
    const Matrix right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
    const Matrix delta = left + right - whole;
    if (depth <= 0) throw std::runtime_error("Dyson quadrature failed to converge");
    if (delta.cwiseAbs().maxCoeff() < 15.0 * tol) {
        acc += left + right + delta / 15.0;
        return;
    }
    adaptive_simpson(f, a, m, fa, fl, fm, left, tol / 2.0, depth - 1, acc);
    adaptive_simpson(f, m, b, fm, fr, fb, right, tol / 2.0, depth - 1, acc);
}

} // namespace

BoundCheck verify_trace_norm_bound(const HermitianOperator& h,
                                   const HermitianOperator& h_pert, double eps,
                                   double beta) {
    if (h.n_qubits() != h_pert.n_qubits())
        throw std::invalid_argument("dimension mismatch");
    const Matrix perturbed = h.matrix() + eps * h_pert.matrix();
    const Matrix rho0 = exact_thermal(h, beta).rho.entries();
    const Matrix rho1 =
        exact_thermal(HermitianOperator(h.n_qubits(), perturbed), beta).rho.entries();

    Eigen::SelfAdjointEigenSolver<Matrix> diff(rho1 - rho0, Eigen::EigenvaluesOnly);
    const double lhs = diff.eigenvalues().cwiseAbs().sum();

    Eigen::SelfAdjointEigenSolver<Matrix> ep(h_pert.matrix(), Eigen::EigenvaluesOnly);
    const double hnorm = ep.eigenvalues().cwiseAbs().maxCoeff();
    const double rhs = eps * beta * hnorm;

    GibbsParts g(h.matrix(), beta);
    auto f = [&](double lambda) { return dyson_integrand(g, h_pert.matrix(), beta, lambda); };
    const Matrix fa = f(0.0), fm = f(0.5), fb = f(1.0);
    const Matrix whole = 1.0 / 6.0 * (fa + 4.0 * fm + fb);
    Matrix integral = Matrix::Zero(fa.rows(), fa.cols());
    adaptive_simpson(f, 0.0, 1.0, fa, fm, fb, whole, 1e-9, 40, integral);
    const double dyson = eps * beta * trace_norm(integral) / g.z;

    return {lhs, rhs, dyson};
}

} // namespace qsim::thermal

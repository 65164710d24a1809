#include "qsim/openquantum.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace qsim::openquantum {

void LindbladModel::validate() const {
    const auto d = dim();
    if (h_s.matrix().rows() != d) throw std::invalid_argument("H_s dimension mismatch");
    const auto nb = static_cast<Eigen::Index>(lindblad_ops.size());
    if (rates.rows() != nb || rates.cols() != nb)
        throw std::invalid_argument("rate matrix must be square over the operator basis");
    if (nb > 0) {
        if ((rates - rates.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw std::invalid_argument("rate matrix must be Hermitian");
        Eigen::SelfAdjointEigenSolver<Matrix> es(rates, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw std::invalid_argument("rate matrix must be positive semidefinite");
    }
    for (const auto& op : lindblad_ops) {
        if (op.rows() != d || op.cols() != d)
            throw std::invalid_argument("Lindblad operator dimension mismatch");
        if (std::abs(op.trace()) > 1e-12)
            throw std::invalid_argument("Lindblad operators must be traceless");
    }
}

LindbladModel make_model(HermitianOperator h_s, Eigen::MatrixXcd rates,
                         std::vector<Matrix> lindblad_ops) {
    LindbladModel m;
    m.n_qubits = h_s.n_qubits();
    m.h_s = std::move(h_s);
    m.rates = std::move(rates);
    m.lindblad_ops = std::move(lindblad_ops);
    m.validate();
    return m;
}

Matrix vectorize(const Matrix& rho) {
    Matrix out(rho.rows() * rho.cols(), 1);
    Eigen::Index idx = 0;
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
        for (Eigen::Index r = 0; r < rho.rows(); ++r) out(idx++, 0) = rho(r, c);
    return out;
}

Matrix unvectorize(const Matrix& column, Eigen::Index d) {
    Matrix out(d, d);
    Eigen::Index idx = 0;
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index r = 0; r < d; ++r) out(r, c) = column(idx++, 0);
    return out;
}

namespace {

// Column-stacking: vec(A X B) = (B^T (x) A) vec(X).
Matrix left_mult(const Matrix& a, Eigen::Index d) {
    return kron(Matrix::Identity(d, d), a);
}
Matrix right_mult(const Matrix& b, Eigen::Index d) {
    return kron(b.transpose(), Matrix::Identity(d, d));
}

} // namespace

Matrix build_lindbladian(const LindbladModel& model) {
    model.validate();
    const auto d = model.dim();
    Matrix gen = Matrix::Zero(d * d, d * d);
    const Matrix& h = model.h_s.matrix();
    gen += complex(0, -1) * (left_mult(h, d) - right_mult(h, d));
    const auto nb = static_cast<Eigen::Index>(model.lindblad_ops.size());
    for (Eigen::Index a = 0; a < nb; ++a) {
        for (Eigen::Index b = 0; b < nb; ++b) {
            const complex m = model.rates(a, b);
            if (m == complex(0.0)) continue;
            const Matrix& la = model.lindblad_ops[static_cast<std::size_t>(a)];
            const Matrix lbd = model.lindblad_ops[static_cast<std::size_t>(b)].adjoint();
            // [La rho, Lb+] + [La, rho Lb+] = 2 La rho Lb+ - Lb+ La rho - rho Lb+ La
            gen += m * (2.0 * kron((lbd.transpose()), la) -
                        left_mult(lbd * la, d) - right_mult(lbd * la, d));
        }
    }
    return gen;
}

bool ChannelMatrix::is_trace_preserving(double tol) const {
    // Tr K(rho) = Tr rho for all rho <=> vec(I)^+ K = vec(I)^+.
    Matrix vid = vectorize(Matrix::Identity(dim, dim));
    Matrix res = vid.adjoint() * k - vid.adjoint();
    return res.cwiseAbs().maxCoeff() < tol;
}

Matrix ChannelMatrix::choi() const {
    const auto d = dim;
    Matrix c = Matrix::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            Matrix eij = Matrix::Zero(d, d);
            eij(i, j) = 1.0;
            Matrix keij = unvectorize(k * vectorize(eij), d);
            c += kron(eij, keij);
        }
    return c;
}

double ChannelMatrix::min_choi_eigenvalue() const {
    Matrix c = choi();
    c = 0.5 * (c + Matrix(c.adjoint()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(c, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

ChannelMatrix exact_channel(const LindbladModel& model, double t) {
    const Matrix gen = build_lindbladian(model);
    ChannelMatrix ch;
    ch.dim = model.dim();
    ch.k = (t * gen).exp();
    return ch;
}

DensityMatrix apply_channel(const ChannelMatrix& channel, const DensityMatrix& rho) {
    if (rho.entries().rows() != channel.dim)
        throw std::invalid_argument("state dimension does not match channel");
    Matrix out = unvectorize(channel.k * vectorize(rho.entries()), channel.dim);
    out = 0.5 * (out + Matrix(out.adjoint()));
    return DensityMatrix(rho.n_qubits(), out);
}

DensityMatrix propagate_exact(const LindbladModel& model, const DensityMatrix& rho0,
                              double t) {
    if (model.n_qubits > 5)
        throw std::invalid_argument("exact propagation guarded to <= 5 qubits");
    auto out = apply_channel(exact_channel(model, t), rho0);
    out.validate(1e-8, 1e-8, 1e-8); // failure here signals a generator bug
    return out;
}

ChannelMatrix trotterized_channel(std::span<const LindbladModel> models, double dt,
                                  int steps, bool strang) {
    if (models.empty()) throw std::invalid_argument("need at least one model");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    const auto d = models.front().dim();
    for (const auto& m : models)
        if (m.dim() != d) throw std::invalid_argument("models act on different spaces");

    std::vector<Matrix> factors;
    for (const auto& m : models) factors.push_back(Matrix((dt * build_lindbladian(m)).exp()));

    Matrix step = Matrix::Identity(d * d, d * d);
    if (strang && factors.size() > 1) {
        const Matrix half = Matrix((0.5 * dt * build_lindbladian(models[0])).exp());
        step = half;
        for (std::size_t i = 1; i < factors.size(); ++i) step = factors[i] * step;
        step = half * step;
    } else {
        for (const auto& f : factors) step = f * step;
    }

    ChannelMatrix ch;
    ch.dim = d;
    ch.k = Matrix::Identity(d * d, d * d);
    for (int i = 0; i < steps; ++i) ch.k = step * ch.k;
    return ch;
}

} // namespace qsim::openquantum

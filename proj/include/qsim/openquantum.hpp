#pragma once

#include "qsim/core.hpp"

#include <vector>

namespace qsim::openquantum {

/// Lindblad model: d rho/dt = -i[H, rho]
///   + sum_ab m_ab ([L_a rho, L_b^+] + [L_a, rho L_b^+]),
/// with m positive semidefinite and the L_a traceless.
struct LindbladModel {
    int n_qubits = 0;
    HermitianOperator h_s;
    Eigen::MatrixXcd rates;          // m_ab
    std::vector<Matrix> lindblad_ops; // Lambda_a

    void validate() const;
    Eigen::Index dim() const { return Eigen::Index(1) << n_qubits; }
};

LindbladModel make_model(HermitianOperator h_s, Eigen::MatrixXcd rates,
                         std::vector<Matrix> lindblad_ops);

/// Dense D^2 x D^2 generator acting on column-stacked density matrices.
Matrix build_lindbladian(const LindbladModel& model);

/// Quantum channel as a matrix on vectorized density operators.
struct ChannelMatrix {
    Eigen::Index dim = 0; // D, the Hilbert-space dimension
    Matrix k;             // D^2 x D^2

    bool is_trace_preserving(double tol = 1e-10) const;
    /// Choi matrix sum_ij E_ij (x) K(E_ij); channel is CP iff it is PSD.
    Matrix choi() const;
    double min_choi_eigenvalue() const;
};

ChannelMatrix exact_channel(const LindbladModel& model, double t);

DensityMatrix apply_channel(const ChannelMatrix& channel, const DensityMatrix& rho);

/// exp(t L) applied to rho0, revalidated as a density matrix.
DensityMatrix propagate_exact(const LindbladModel& model, const DensityMatrix& rho0,
                              double t);

/// First-order channel splitting: the factors K_i(dt) = exp(dt L_i) composed
/// cyclically, `steps` times. A symmetric (Strang) option halves the first
/// generator on both sides of each step.
ChannelMatrix trotterized_channel(std::span<const LindbladModel> models, double dt,
                                  int steps, bool strang = false);

Matrix vectorize(const Matrix& rho);
Matrix unvectorize(const Matrix& column, Eigen::Index d);

} // namespace qsim::openquantum

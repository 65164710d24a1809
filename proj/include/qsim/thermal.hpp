#pragma once

#include "qsim/core.hpp"
#include "qsim/rng.hpp"

#include <optional>
#include <vector>

namespace qsim::thermal {

/// A Hamiltonian with its Gibbs state at inverse temperature beta (k_B = 1).
struct ThermalContext {
    HermitianOperator h;
    double beta = 0.0;
    DensityMatrix rho;
};

/// rho = exp(-beta H) / Tr exp(-beta H) by eigendecomposition.
ThermalContext exact_thermal(const HermitianOperator& h, double beta);

struct UpdateOutcome {
    DensityMatrix rho_next;
    double exact_success;       // Tr[(1 - eps beta h'/2) rho (1 - eps beta h'/2)]
    double first_order_success; // 1 - eps beta Tr(rho h')
};

/// One perturbative update rho(H) -> rho(H + eps h): quadratic-form map with
/// the PSD-shifted perturbation h' = h - lambda_min(h) I (the shift leaves
/// the Gibbs target unchanged and keeps the success rate a probability),
/// renormalization, then exact dephasing in the eigenbasis of H + eps h.
/// The context advances to (H + eps h, beta, rho_next).
UpdateOutcome perturbative_update(ThermalContext& ctx, const HermitianOperator& h_pert,
                                  double eps);

struct ChainStep {
    double exact_success;
    double first_order_success;
};

struct ChainResult {
    DensityMatrix rho;
    double cumulative_success = 1.0;
    std::vector<ChainStep> log;
    int restarts = 0;
    long total_steps = 0;
};

/// Builds the Gibbs state of H1 (x) I + I (x) H2 + coupling from the product
/// of subsystem Gibbs states by ceil(1/eps) perturbative updates. With `mc`
/// set, each step may fail with its success probability and the chain
/// restarts from the product state (capped at max_restarts).
ChainResult chain_update(const HermitianOperator& h1, const HermitianOperator& h2,
                         const Matrix& coupling, double beta, double eps,
                         rng::Stream* mc = nullptr, int max_restarts = 1000);

struct BoundCheck {
    double lhs;       // || rho(H + eps h) - rho(H) ||_tr
    double rhs;       // eps beta ||h||
    double dyson_lhs; // (eps beta / Z) || int_0^1 e^{-bH(1-l)} h e^{-bHl} dl ||_tr
};

/// Numerical check of the perturbation bound: both the exact Gibbs-state
/// difference and the first-order Dyson term must sit below eps beta ||h||.
/// The Dyson integral is evaluated by adaptive Simpson quadrature (1e-9).
BoundCheck verify_trace_norm_bound(const HermitianOperator& h,
                                   const HermitianOperator& h_pert, double eps,
                                   double beta);

} // namespace qsim::thermal

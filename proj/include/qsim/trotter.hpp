#pragma once

#include "qsim/core.hpp"

#include <string>
#include <vector>

namespace qsim::trotter {

/// One local term of H = sum_i H_i; `matrix` lives on the support qubits
/// (support[j] carries bit j of its index).
struct HamiltonianTerm {
    std::vector<int> support;
    Matrix matrix;
    std::string label;
};

HamiltonianTerm make_term(std::vector<int> support, Matrix m, std::string label = "");

struct PlanStep {
    int term;
    double duration; // signed; Suzuki coefficients go negative above order 2
};

struct TrotterPlan {
    std::vector<PlanStep> steps;
    int order = 1;
    int slices = 1;
};

/// Suzuki coefficient z_k = (4 - 4^{1/(2k-1)})^{-1}, defined for k >= 2.
double suzuki_z(int k);

/// Exponential count after merging adjacent identical terms:
/// 2(m-1) 5^{k-1} + 1 for the S_2k approximant (2m-1 for S_2).
std::size_t exponential_count(int m_terms, int half_order_k);

/// Builds the product-formula plan for exp(-iHt). Order 1 is the plain
/// Lloyd splitting; order 2 the palindromic split; higher even orders use
/// the Suzuki recursion. Adjacent identical-term exponentials are merged.
TrotterPlan build_plan(std::span<const HamiltonianTerm> terms, double t,
                       int order, int slices);

void execute_plan(StateVector& psi, const TrotterPlan& plan,
                  std::span<const HamiltonianTerm> terms);

/// Embeds and sums all terms on an n-qubit space.
Matrix total_hamiltonian(std::span<const HamiltonianTerm> terms, int n_qubits);

/// Dense plan unitary on n qubits, in plan order.
Matrix plan_unitary(const TrotterPlan& plan, std::span<const HamiltonianTerm> terms,
                    int n_qubits);

/// Spectral-norm error || U_plan - exp(-iHt) ||, both built densely.
double plan_error(std::span<const HamiltonianTerm> terms, double t,
                  const TrotterPlan& plan, int n_qubits);

struct OrderSelection {
    int half_order;   // k: the S_2k family member chosen
    int slices;
    std::size_t exponentials;
    double measured_error;
};

/// Sweeps k in {1..4}, binary-searching the minimal slice count that meets
/// `target_error`, and returns the combination with the fewest exponentials.
OrderSelection select_order(std::span<const HamiltonianTerm> terms, double t,
                            double target_error, int n_qubits);

} // namespace qsim::trotter
